#include <hlasso/io.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include <hlasso/errors.hpp>

namespace hlasso::io {

using nlohmann::json;

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    std::string out(s.substr(b, e - b + 1));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(line);
    }
    return out;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t") == std::string::npos; }

bool parse_number(const std::string& cell, double& out)
{
    if (cell.empty()) return false;
    const char* first = cell.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size();
}

std::unordered_map<std::string, Index> name_index(const std::vector<std::string>& names)
{
    std::unordered_map<std::string, Index> idx;
    for (std::size_t j = 0; j < names.size(); ++j) idx.emplace(names[j], static_cast<Index>(j));
    return idx;
}

json to_array(const Vector& v)
{
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json parse_config(const std::string& config_json)
{
    if (config_json.empty()) return json::object();
    json c = json::parse(config_json);
    if (!c.is_object()) throw InputError("embedded config must be a JSON object");
    return c;
}

json groups_json(const GroupStructure& g, const Vector& d, const std::vector<std::string>& names)
{
    json out = json::array();
    for (Index k = 0; k < g.n_groups(); ++k) {
        json members = json::array();
        for (Index j : g.members(k)) members.push_back(names[static_cast<std::size_t>(j)]);
        out.push_back({{"id", g.id(k)}, {"d", d(k)}, {"members", members}});
    }
    return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int get_int(const std::string& key, const std::string& value)
{
    int out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw InputError("config key '" + key + "': expected an integer, got '" + value + "'");
    }
    return out;
}

double get_double(const std::string& key, const std::string& value)
{
    double out = 0.0;
    if (!parse_number(value, out)) throw InputError("config key '" + key + "': expected a number, got '" + value + "'");
    return out;
}

template <class Fit>
std::string path_rows(const std::vector<Fit>& fits, const StandardizedDataset& ds,
                      const std::vector<std::string>& names)
{
    std::ostringstream out;
    out << "lambda,converged,iterations,objective,intercept";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (const auto& f : fits) {
        double intercept = f.intercept;
        Vector beta;
        if constexpr (std::is_same_v<Fit, LogisticHLassoFit>) {
            const auto o = destandardize(f.beta, f.intercept, ds);
            beta = o.beta;
            intercept = o.intercept;
        } else {
            beta = destandardize(f.beta, 0.0, ds).beta;
        }
        out << format_double(f.lambda) << ',' << (f.converged ? 1 : 0) << ',' << f.iterations << ','
            << format_double(f.objective_trace.empty() ? 0.0 : f.objective_trace.back()) << ','
            << format_double(intercept);
        for (Index j = 0; j < beta.size(); ++j) out << ',' << format_double(beta(j));
        out << '\n';
    }
    return out.str();
}

} // namespace

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    out << text;
    if (!out) throw InputError("write failed: " + path);
}

DataTable parse_data_csv(const std::string& text, const std::string& response, const std::string& source)
{
    const auto lines = lines_of(text);
    std::size_t first = 0;
    while (first < lines.size() && blank(lines[first])) ++first;
    if (first == lines.size()) throw InputError(source + ": empty CSV");

    std::vector<std::string> header;
    for (const auto& c : split(lines[first], ',')) header.push_back(trim(c));
    const std::size_t width = header.size();
    Index response_col = -1;
    for (std::size_t c = 0; c < width; ++c) {
        if (header[c].empty()) throw InputError(source + ": empty name in header column " + std::to_string(c + 1));
        if (std::count(header.begin(), header.end(), header[c]) > 1) {
            throw InputError(source + ": duplicate column '" + header[c] + "'");
        }
        if (header[c] == response) response_col = static_cast<Index>(c);
    }
    if (response_col < 0) throw InputError(source + ": response column '" + response + "' not found");
    if (width < 2) throw InputError(source + ": no predictor columns");

    std::vector<std::vector<double>> rows;
    for (std::size_t l = first + 1; l < lines.size(); ++l) {
        if (blank(lines[l])) continue;
        const auto cells = split(lines[l], ',');
        if (cells.size() != width) {
            throw InputError(source + ": line " + std::to_string(l + 1) + " has " + std::to_string(cells.size()) +
                             " fields, header has " + std::to_string(width));
        }
        std::vector<double> row(width);
        for (std::size_t c = 0; c < width; ++c) {
            const std::string cell = trim(cells[c]);
            if (!parse_number(cell, row[c]) || !std::isfinite(row[c])) {
                throw InputError(source + ": malformed value '" + cell + "' in column '" + header[c] + "' (line " +
                                 std::to_string(l + 1) + ")");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError(source + ": no data rows");

    DataTable t;
    t.response = response;
    const Index n = static_cast<Index>(rows.size());
    t.X.resize(n, static_cast<Index>(width - 1));
    t.y.resize(n);
    for (std::size_t c = 0, p = 0; c < width; ++c) {
        if (static_cast<Index>(c) == response_col) continue;
        t.names.push_back(header[c]);
        for (Index i = 0; i < n; ++i) t.X(i, static_cast<Index>(p)) = rows[static_cast<std::size_t>(i)][c];
        ++p;
    }
    for (Index i = 0; i < n; ++i) t.y(i) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(response_col)];
    return t;
}

DataTable read_data_csv(const std::string& path, const std::string& response)
{
    return parse_data_csv(read_text(path), response, path);
}

GroupStructure parse_group_csv(const std::string& text, const std::vector<std::string>& names)
{
    const auto idx = name_index(names);
    std::vector<GroupSpec> specs;
    std::unordered_map<std::string, std::size_t> group_pos;
    bool first_row = true;
    const auto lines = lines_of(text);
    for (std::size_t l = 0; l < lines.size(); ++l) {
        if (blank(lines[l])) continue;
        const auto cells = split(lines[l], ',');
        if (cells.size() != 2) {
            throw InputError("group map line " + std::to_string(l + 1) + ": expected variable_name,group_id");
        }
        const std::string var = trim(cells[0]);
        const std::string gid = trim(cells[1]);
        const auto it = idx.find(var);
        if (it == idx.end()) {
            if (first_row) {  // header row
                first_row = false;
                continue;
            }
            throw InputError("group map names unknown column '" + var + "'");
        }
        first_row = false;
        if (gid.empty()) throw InputError("group map: empty group id for column '" + var + "'");
        auto [pos, fresh] = group_pos.emplace(gid, specs.size());
        if (fresh) specs.push_back({gid, {}});
        specs[pos->second].members.push_back(it->second);
    }
    try {
        return GroupStructure::build(std::move(specs), static_cast<Index>(names.size()));
    } catch (const InputError& e) {
        std::string msg = e.what();
        const std::string key = "index ";
        if (const auto p = msg.rfind(key); p != std::string::npos) {
            const auto j = static_cast<std::size_t>(std::stoul(msg.substr(p + key.size())));
            if (j < names.size()) msg += " (column '" + names[j] + "')";
        }
        throw InputError("group map: " + msg);
    }
}

GroupStructure parse_group_json(const std::string& text, const std::vector<std::string>& names)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("group map: invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw InputError("group map: expected a JSON list of lists");
    const auto idx = name_index(names);
    std::vector<GroupSpec> specs;
    for (std::size_t k = 0; k < doc.size(); ++k) {
        if (!doc[k].is_array()) throw InputError("group map: entry " + std::to_string(k) + " is not a list");
        GroupSpec s{std::to_string(k), {}};
        for (const auto& m : doc[k]) {
            if (m.is_string()) {
                const auto it = idx.find(m.get<std::string>());
                if (it == idx.end()) throw InputError("group map names unknown column '" + m.get<std::string>() + "'");
                s.members.push_back(it->second);
            } else if (m.is_number_integer()) {
                s.members.push_back(m.get<Index>());
            } else {
                throw InputError("group map: members must be column names or integer indices");
            }
        }
        specs.push_back(std::move(s));
    }
    return GroupStructure::build(std::move(specs), static_cast<Index>(names.size()));
}

GroupStructure read_group_map(const std::string& path, const std::vector<std::string>& names)
{
    const std::string text = read_text(path);
    const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    return is_json ? parse_group_json(text, names) : parse_group_csv(text, names);
}

GroupStructure parse_gmt(const std::string& text, const std::vector<std::string>& names)
{
    const auto idx = name_index(names);
    std::vector<GroupSpec> specs;
    const auto lines = lines_of(text);
    for (std::size_t l = 0; l < lines.size(); ++l) {
        if (blank(lines[l])) continue;
        const auto cells = split(lines[l], '\t');
        if (cells.size() < 2) throw InputError("GMT line " + std::to_string(l + 1) + ": expected name<TAB>description");
        GroupSpec s{trim(cells[0]), {}};
        if (s.id.empty()) throw InputError("GMT line " + std::to_string(l + 1) + ": empty set name");
        for (std::size_t c = 2; c < cells.size(); ++c) {
            const auto it = idx.find(trim(cells[c]));
            if (it == idx.end()) continue;
            if (std::find(s.members.begin(), s.members.end(), it->second) == s.members.end()) {
                s.members.push_back(it->second);
            }
        }
        if (!s.members.empty()) specs.push_back(std::move(s));
    }
    if (specs.empty()) throw InputError("GMT file has no set overlapping the data columns");
    return GroupStructure::build(std::move(specs), static_cast<Index>(names.size()));
}

GroupStructure read_gmt(const std::string& path, const std::vector<std::string>& names)
{
    return parse_gmt(read_text(path), names);
}

std::map<std::string, std::string> parse_key_value(const std::string& text)
{
    std::map<std::string, std::string> kv;
    const auto lines = lines_of(text);
    for (std::size_t l = 0; l < lines.size(); ++l) {
        std::string line = lines[l];
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        if (blank(line)) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("config line " + std::to_string(l + 1) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw InputError("config line " + std::to_string(l + 1) + ": empty key");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::map<std::string, std::string> read_key_value(const std::string& path) { return parse_key_value(read_text(path)); }

sim::BenchConfig bench_config_from(const std::map<std::string, std::string>& kv, sim::BenchConfig cfg)
{
    for (const auto& [key, value] : kv) {
        if (key == "case") {
            cfg.sim_case = get_int(key, value);
            if (cfg.sim_case != 1 && cfg.sim_case != 2) throw InputError("config key 'case': must be 1 or 2");
        } else if (key == "method") {
            cfg.method = sim::parse_method(value);
        } else if (key == "reps") {
            cfg.reps = get_int(key, value);
        } else if (key == "grid") {
            const auto spec = sim::GridSpec::parse(value);
            cfg.grid.min = spec.min;
            cfg.grid.max = spec.max;
            cfg.grid.count = spec.count;
        } else if (key == "grid_count") {
            cfg.grid.count = get_int(key, value);
        } else if (key == "grid_ratio") {
            cfg.grid.ratio = get_double(key, value);
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(get_double(key, value));
        } else if (key == "jobs") {
            cfg.jobs = get_int(key, value);
        } else if (key == "n_train") {
            cfg.n_train = get_int(key, value);
        } else if (key == "n_valid") {
            cfg.n_valid = get_int(key, value);
        } else if (key == "n_test") {
            cfg.n_test = get_int(key, value);
        } else if (key == "gamma") {
            cfg.gamma = get_double(key, value);
        } else if (key == "sigma") {
            cfg.sigma = get_double(key, value);
        } else if (key == "sigma_mc_n") {
            cfg.sigma_mc_n = get_int(key, value);
        } else {
            throw InputError("unknown config key '" + key + "'");
        }
    }
    if (cfg.reps < 1) throw InputError("config key 'reps': must be >= 1");
    return cfg;
}

std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fit_json(const HLassoFit& fit, const StandardizedDataset& ds, const GroupStructure& g,
                     const std::vector<std::string>& names, const std::string& config_json)
{
    const auto orig = destandardize(fit.beta, 0.0, ds);
    json j;
    j["config"] = parse_config(config_json);
    j["family"] = "gaussian";
    j["lambda"] = fit.lambda;
    j["variables"] = names;
    j["d"] = to_array(fit.d);
    j["alpha"] = to_array(fit.alpha);
    j["beta"] = to_array(orig.beta);
    j["beta_standardized"] = to_array(fit.beta);
    j["intercept"] = orig.intercept;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["objective"] = fit.objective();
    j["groups"] = groups_json(g, fit.d, names);
    return dump(j);
}

std::string fit_json(const LogisticHLassoFit& fit, const StandardizedDataset& ds, const GroupStructure& g,
                     const std::vector<std::string>& names, const std::string& config_json)
{
    const auto orig = destandardize(fit.beta, fit.intercept, ds);
    json j;
    j["config"] = parse_config(config_json);
    j["family"] = "binomial";
    j["lambda"] = fit.lambda;
    j["variables"] = names;
    j["d"] = to_array(fit.d);
    j["alpha"] = to_array(fit.alpha);
    j["beta"] = to_array(orig.beta);
    j["beta_standardized"] = to_array(fit.beta);
    j["intercept"] = orig.intercept;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["objective"] = fit.penalized_loglik();
    j["loglik"] = fit.loglik;
    if (!fit.diagnostic.empty()) j["diagnostic"] = fit.diagnostic;
    j["groups"] = groups_json(g, fit.d, names);
    return dump(j);
}

std::string path_csv(const std::vector<HLassoFit>& fits, const StandardizedDataset& ds,
                     const std::vector<std::string>& names)
{
    return path_rows(fits, ds, names);
}

std::string path_csv(const std::vector<LogisticHLassoFit>& fits, const StandardizedDataset& ds,
                     const std::vector<std::string>& names)
{
    return path_rows(fits, ds, names);
}

std::string sim_reps_csv(const sim::SimReport& report)
{
    std::ostringstream out;
    out << "rep,ok,mse,zero_var_pct,nonzero_var_pct,lambda,fits,converged_fits,max_identity_residual,"
           "ascent_violations,error\n";
    for (const auto& r : report.reps) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out << r.rep << ',' << (r.ok ? 1 : 0) << ',' << format_double(r.mse) << ',' << format_double(r.zero_var_pct)
            << ',' << format_double(r.nonzero_var_pct) << ',' << format_double(r.lambda) << ',' << r.fits << ','
            << r.converged_fits << ',' << format_double(r.max_identity_residual) << ',' << r.ascent_violations << ','
            << err << '\n';
    }
    return out.str();
}

std::string sim_summary_json(const sim::SimReport& report, const std::string& config_json)
{
    auto summary = [](const sim::Summary& s) { return json{{"mean", s.mean}, {"se", s.se}}; };
    json j;
    j["config"] = parse_config(config_json);
    j["case"] = report.config.sim_case;
    j["method"] = sim::to_string(report.config.method);
    j["reps"] = report.reps.size();
    j["failed_reps"] = report.failed_reps;
    j["sigma"] = report.sigma;
    j["mse"] = summary(report.mse);
    j["zero_var_pct"] = summary(report.zero_var_pct);
    j["nonzero_var_pct"] = summary(report.nonzero_var_pct);
    return dump(j);
}

std::string tune_json(const TuneResult& result, const std::string& config_json)
{
    json j;
    j["config"] = parse_config(config_json);
    j["lambda"] = result.lambda;
    j["grid"] = result.grid;
    j["cv_mean"] = result.cv_mean;
    j["cv_se"] = result.cv_se;
    j["refolds"] = result.refolds;
    return dump(j);
}

std::string lrt_json(const LrtResult& r, const std::vector<std::string>& null_names, const std::string& config_json)
{
    json j;
    j["config"] = parse_config(config_json);
    j["null_set"] = null_names;
    j["statistic"] = r.statistic;
    j["raw_statistic"] = r.raw_statistic;
    j["q"] = r.q;
    j["p_value"] = r.p_value;
    j["sup_full"] = r.sup_full;
    j["sup_null"] = r.sup_null;
    j["sigma2"] = r.sigma2;
    return dump(j);
}

std::string misclassification_csv(const Vector& y, const Vector& prob, double threshold)
{
    if (y.size() != prob.size()) throw InputError("misclassification report: size mismatch");
    std::ostringstream out;
    out << "index,observed,probability,predicted,error\n";
    for (Index i = 0; i < y.size(); ++i) {
        const int pred = prob(i) > threshold ? 1 : 0;
        const int wrong = pred != static_cast<int>(y(i)) ? 1 : 0;
        out << i << ',' << static_cast<int>(y(i)) << ',' << format_double(prob(i)) << ',' << pred << ',' << wrong
            << '\n';
    }
    return out.str();
}

} // namespace hlasso::io
