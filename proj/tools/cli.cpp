#include "cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include <hlasso/dataset.hpp>
#include <hlasso/engine.hpp>
#include <hlasso/errors.hpp>
#include <hlasso/io.hpp>
#include <hlasso/logistic.hpp>
#include <hlasso/lrt.hpp>
#include <hlasso/penalty.hpp>
#include <hlasso/simbench.hpp>
#include <hlasso/tuning.hpp>

namespace hlasso::cli {

namespace {

using nlohmann::json;

struct Options
{
    std::string data;
    std::string groups;
    std::string gmt;
    std::string response = "y";
    std::string family = "gaussian";
    std::optional<double> lambda;
    std::string grid;
    bool adaptive = false;
    double gamma = 1.0;
    int sim_case = 1;
    std::string method = "hlasso";
    int reps = 50;
    std::uint64_t seed = 1;
    int jobs = 0;
    int folds = 5;
    std::string out = "-";
    std::string format = "json";
    std::string config;
    std::string misclass;
    std::vector<std::string> null_set;
    std::vector<std::string> support;
    int verbosity = 0;
};

/// Data, groups, and standardized copy shared by the data-driven commands.
struct Problem
{
    io::DataTable table;
    GroupStructure groups;
    StandardizedDataset ds;
    bool binary = false;
};

bool is_binary(const Options& o) { return o.family == "binomial"; }

Problem load_problem(const Options& o)
{
    if (o.data.empty()) throw InputError("--data is required");
    if (o.groups.empty() == o.gmt.empty()) throw InputError("give exactly one of --groups or --gmt");
    if (!o.gmt.empty() && !is_binary(o)) throw InputError("--gmt input requires --family binomial");
    for (const std::string* p : {&o.data, &o.groups, &o.gmt}) {
        if (!p->empty() && !std::filesystem::exists(*p)) throw InputError("file not found: " + *p);
    }
    io::DataTable table = io::read_data_csv(o.data, o.response);
    GroupStructure g = o.gmt.empty() ? io::read_group_map(o.groups, table.names) : io::read_gmt(o.gmt, table.names);
    const ResponseMode mode = is_binary(o) ? ResponseMode::binary : ResponseMode::gaussian;
    StandardizedDataset ds = StandardizedDataset::standardize(table.X, table.y, mode);
    return Problem{std::move(table), std::move(g), std::move(ds), is_binary(o)};
}

Vector penalty_weights(const Options& o, const StandardizedDataset& ds)
{
    if (!o.adaptive) return Vector::Ones(ds.n_vars());
    if (ds.n() > ds.n_vars()) return make_weights(OlsPowerWeights{o.gamma}, ds);
    return make_weights(RidgePowerWeights{o.gamma, 1.0}, ds);
}

std::vector<double> resolve_grid(const Options& o, const Problem& p, const Vector& w)
{
    if (!o.grid.empty()) return sim::GridSpec::parse(o.grid).explicit_grid();
    return p.binary ? logistic_lambda_grid(p.ds, w) : hlasso_lambda_grid(p.ds, w);
}

json config_json(const std::string& command, const Options& o)
{
    json c;
    c["command"] = command;
    c["family"] = o.family;
    c["seed"] = o.seed;
    auto put = [&](const char* key, const std::string& v) {
        if (!v.empty()) c[key] = v;
    };
    put("data", o.data);
    put("groups", o.groups);
    put("gmt", o.gmt);
    put("grid", o.grid);
    if (command != "simulate") c["response"] = o.response;
    if (o.lambda) c["lambda"] = *o.lambda;
    c["adaptive"] = o.adaptive;
    c["gamma"] = o.gamma;
    if (command == "simulate" || command == "tune") c["method"] = o.method;
    if (command == "tune") c["folds"] = o.folds;
    if (command == "lrt") {
        c["null"] = o.null_set;
        c["support"] = o.support;
    }
    return c;
}

void emit(const Options& o, const std::string& text, std::ostream& out)
{
    if (o.out == "-") {
        out << text;
    } else {
        io::write_text(o.out, text);
    }
}

std::string csv_config_comment(const json& cfg) { return "# config: " + cfg.dump() + "\n"; }

int cmd_fit(const Options& o, std::ostream& out, std::ostream& err)
{
    if (!o.lambda) throw InputError("--lambda is required");
    const Problem p = load_problem(o);
    const Vector w = penalty_weights(o, p.ds);
    const PenaltySpec pen{{*o.lambda}, w, UnitWeights{}};
    const json cfg = config_json("fit", o);
    bool converged = false;
    if (p.binary) {
        const LogisticHLassoFit fit = fit_logistic_hlasso(p.ds, p.groups, pen);
        converged = fit.converged;
        emit(o, o.format == "csv" ? csv_config_comment(cfg) + io::path_csv({fit}, p.ds, p.table.names)
                                  : io::fit_json(fit, p.ds, p.groups, p.table.names, cfg.dump()),
             out);
        if (!o.misclass.empty()) {
            io::write_text(o.misclass, io::misclassification_csv(p.table.y, predict_proba(fit, p.ds.X())));
        }
    } else {
        if (!o.misclass.empty()) throw InputError("--misclass needs --family binomial");
        const HLassoFit fit = fit_hlasso(p.ds, p.groups, pen);
        converged = fit.converged;
        emit(o, o.format == "csv" ? csv_config_comment(cfg) + io::path_csv({fit}, p.ds, p.table.names)
                                  : io::fit_json(fit, p.ds, p.groups, p.table.names, cfg.dump()),
             out);
    }
    if (!converged) err << "warning: fit did not converge\n";
    return converged ? ok : not_converged;
}

int cmd_path(const Options& o, std::ostream& out, std::ostream& err)
{
    const Problem p = load_problem(o);
    const Vector w = penalty_weights(o, p.ds);
    const std::vector<double> grid = resolve_grid(o, p, w);
    const json cfg = config_json("path", o);
    auto render = [&](const auto& fits) {
        if (o.format == "csv") return csv_config_comment(cfg) + io::path_csv(fits, p.ds, p.table.names);
        json j;
        j["config"] = cfg;
        j["fits"] = json::array();
        for (const auto& f : fits) {
            json fj = json::parse(io::fit_json(f, p.ds, p.groups, p.table.names, "{}"));
            fj.erase("config");
            j["fits"].push_back(std::move(fj));
        }
        return j.dump(2) + "\n";
    };
    bool all_converged = true;
    if (p.binary) {
        const auto fits = fit_logistic_path(p.ds, p.groups, grid, w);
        for (const auto& f : fits) all_converged = all_converged && f.converged;
        emit(o, render(fits), out);
    } else {
        const auto fits = fit_path(p.ds, p.groups, grid, w);
        for (const auto& f : fits) all_converged = all_converged && f.converged;
        emit(o, render(fits), out);
    }
    if (!all_converged) err << "warning: at least one path fit did not converge\n";
    return all_converged ? ok : not_converged;
}

int cmd_simulate(const Options& o, const CLI::App& sub, std::ostream& out, std::ostream& err)
{
    sim::BenchConfig cfg;
    if (!o.config.empty()) cfg = io::bench_config_from(io::read_key_value(o.config));
    // Flags given on the command line override the config file.
    if (sub.count("--case")) cfg.sim_case = o.sim_case;
    if (sub.count("--method")) cfg.method = sim::parse_method(o.method);
    if (sub.count("--adaptive") && o.adaptive) cfg.method = sim::Method::adaptive_hlasso;
    if (sub.count("--reps")) cfg.reps = o.reps;
    if (sub.count("--seed")) cfg.seed = o.seed;
    if (sub.count("--gamma")) cfg.gamma = o.gamma;
    if (sub.count("--grid")) {
        const auto g = sim::GridSpec::parse(o.grid);
        cfg.grid.min = g.min;
        cfg.grid.max = g.max;
        cfg.grid.count = g.count;
    }
    if (sub.count("--jobs")) cfg.jobs = o.jobs;
    if (cfg.sim_case != 1 && cfg.sim_case != 2) throw InputError("--case must be 1 or 2");
    if (cfg.reps < 1) throw InputError("--reps must be >= 1");

    json c;
    c["command"] = "simulate";
    c["case"] = cfg.sim_case;
    c["method"] = sim::to_string(cfg.method);
    c["reps"] = cfg.reps;
    c["seed"] = cfg.seed;
    c["gamma"] = cfg.gamma;
    c["grid"] = cfg.grid.min ? json(io::format_double(*cfg.grid.min) + ":" + io::format_double(*cfg.grid.max) +
                                    ":" + std::to_string(cfg.grid.count))
                             : json("auto:" + std::to_string(cfg.grid.count));
    c["n_train"] = cfg.n_train;
    c["n_valid"] = cfg.n_valid;
    c["n_test"] = cfg.n_test;
    if (!o.config.empty()) c["config_file"] = o.config;

    if (o.verbosity > 0) err << "running " << cfg.reps << " replications\n";
    const sim::SimReport report = sim::run_benchmark(cfg);
    for (const auto& r : report.reps) {
        if (!r.ok) err << "rep " << r.rep << " failed: " << r.error << "\n";
    }

    const std::string csv = csv_config_comment(c) + io::sim_reps_csv(report);
    const std::string summary = io::sim_summary_json(report, c.dump());
    if (o.out == "-") {
        out << (o.format == "csv" ? csv : summary);
    } else {
        io::write_text(o.out + "_reps.csv", csv);
        io::write_text(o.out + "_summary.json", summary);
    }
    if (report.failed_reps == static_cast<int>(report.reps.size())) {
        err << "error: every replication failed\n";
        return input_error;
    }
    return ok;
}

int cmd_tune(const Options& o, std::ostream& out, std::ostream&)
{
    const Problem p = load_problem(o);
    TuneConfig cfg;
    cfg.method = sim::parse_method(o.method);
    if (o.adaptive) cfg.method = sim::Method::adaptive_hlasso;
    cfg.k = o.folds;
    cfg.seed = o.seed;
    cfg.mode = p.ds.mode();
    cfg.gamma = o.gamma;
    if (!o.grid.empty()) cfg.grid = sim::GridSpec::parse(o.grid).explicit_grid();
    const TuneResult r = tune_kfold(p.table.X, p.table.y, p.groups, cfg);
    emit(o, io::tune_json(r, config_json("tune", o).dump()), out);
    return ok;
}

std::vector<Index> lookup(const std::vector<std::string>& wanted, const std::vector<std::string>& names)
{
    std::unordered_map<std::string, Index> idx;
    for (std::size_t j = 0; j < names.size(); ++j) idx.emplace(names[j], static_cast<Index>(j));
    std::vector<Index> out;
    for (const auto& n : wanted) {
        const auto it = idx.find(n);
        if (it == idx.end()) throw InputError("unknown variable '" + n + "'");
        out.push_back(it->second);
    }
    return out;
}

int cmd_lrt(const Options& o, std::ostream& out, std::ostream& err)
{
    if (!o.lambda) throw InputError("--lambda is required");
    if (o.null_set.empty()) throw InputError("--null needs at least one variable name");
    const Problem p = load_problem(o);
    const std::vector<Index> null_idx = lookup(o.null_set, p.table.names);
    const std::vector<Index> support = lookup(o.support, p.table.names);
    const Vector w = penalty_weights(o, p.ds);
    const PenaltySpec pen{{*o.lambda}, w, UnitWeights{}};
    try {
        const LrtResult r = lrt_statistic(p.ds, p.groups, pen, support, null_idx);
        emit(o, io::lrt_json(r, o.null_set, config_json("lrt", o).dump()), out);
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << "\n";
        return not_converged;
    }
    return ok;
}

void add_data_options(CLI::App* sub, Options& o)
{
    sub->add_option("--data", o.data, "CSV with a header row of variable names");
    sub->add_option("--groups", o.groups, "group map: CSV (variable_name,group_id) or JSON list of lists");
    sub->add_option("--gmt", o.gmt, "GMT gene-set file (binomial family only)");
    sub->add_option("--response", o.response, "name of the response column")->capture_default_str();
    sub->add_option("--family", o.family, "gaussian or binomial")
        ->check(CLI::IsMember({"gaussian", "binomial"}))
        ->capture_default_str();
    sub->add_flag("--adaptive", o.adaptive, "adaptive weights 1/|pilot|^gamma");
    sub->add_option("--gamma", o.gamma, "adaptive weight exponent")->capture_default_str();
}

void add_output_options(CLI::App* sub, Options& o)
{
    sub->add_option("--out", o.out, "output path, '-' for stdout")->capture_default_str();
    sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Hierarchical lasso for group variable selection", args.empty() ? "hlasso" : args[0]};
    app.require_subcommand(1);
    app.add_flag("-v,--verbose", o.verbosity, "more progress messages");

    CLI::App* fit = app.add_subcommand("fit", "fit at a single lambda");
    add_data_options(fit, o);
    fit->add_option("--lambda", o.lambda, "penalty level");
    fit->add_option("--misclass", o.misclass, "binomial only: write a training-set misclassification CSV");
    add_output_options(fit, o);

    CLI::App* path = app.add_subcommand("path", "fit along a lambda grid with warm starts");
    add_data_options(path, o);
    path->add_option("--grid", o.grid, "min:max:count (log-spaced); data-driven when omitted");
    add_output_options(path, o);

    CLI::App* simulate = app.add_subcommand("simulate", "run the simulation benchmark");
    simulate->add_option("--config", o.config, "flat key = value benchmark config");
    simulate->add_option("--case", o.sim_case, "simulation design, 1 or 2")->capture_default_str();
    simulate->add_option("--method", o.method, "hlasso, adaptive_hlasso, lasso or ols")->capture_default_str();
    simulate->add_flag("--adaptive", o.adaptive, "shorthand for --method adaptive_hlasso");
    simulate->add_option("--gamma", o.gamma, "adaptive weight exponent")->capture_default_str();
    simulate->add_option("--reps", o.reps, "replications")->capture_default_str();
    simulate->add_option("--seed", o.seed, "master seed")->capture_default_str();
    simulate->add_option("--jobs", o.jobs, "worker threads, 0 = all cores")->capture_default_str();
    simulate->add_option("--grid", o.grid, "min:max:count; data-driven when omitted");
    simulate->add_option("--out", o.out, "output prefix: writes PREFIX_reps.csv and PREFIX_summary.json")
        ->capture_default_str();
    simulate->add_option("--format", o.format, "stdout format when --out is '-'")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    CLI::App* tune = app.add_subcommand("tune", "choose lambda by k-fold cross-validation");
    add_data_options(tune, o);
    tune->add_option("--method", o.method, "hlasso, adaptive_hlasso or lasso")->capture_default_str();
    tune->add_option("--grid", o.grid, "min:max:count; data-driven when omitted");
    tune->add_option("--folds", o.folds, "number of folds")->capture_default_str();
    tune->add_option("--seed", o.seed, "fold assignment seed")->capture_default_str();
    tune->add_option("--out", o.out, "output path, '-' for stdout")->capture_default_str();

    CLI::App* lrt = app.add_subcommand("lrt", "penalized likelihood-ratio test of coefficients");
    add_data_options(lrt, o);
    lrt->add_option("--lambda", o.lambda, "penalty level");
    lrt->add_option("--null", o.null_set, "variables set to zero under the null")->delimiter(',');
    lrt->add_option("--support", o.support, "restrict both fits to these variables")->delimiter(',');
    lrt->add_option("--out", o.out, "output path, '-' for stdout")->capture_default_str();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return input_error;
    }

    try {
        if (*fit) return cmd_fit(o, out, err);
        if (*path) return cmd_path(o, out, err);
        if (*simulate) return cmd_simulate(o, *simulate, out, err);
        if (*tune) return cmd_tune(o, out, err);
        if (*lrt) return cmd_lrt(o, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return input_error;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << "\n";
        return not_converged;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return input_error;
    }
    return input_error;
}

} // namespace hlasso::cli
