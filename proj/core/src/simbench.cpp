#include <hlasso/simbench.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include <hlasso/dataset.hpp>
#include <hlasso/errors.hpp>
#include <hlasso/penalty.hpp>

namespace hlasso::sim {

namespace {

constexpr Index n_continuous = 8;
constexpr Index poly_order = 4;
constexpr Index n_dummies = 3;

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

void check_case(int sim_case)
{
    if (sim_case != 1 && sim_case != 2) throw InputError("simulation case must be 1 or 2");
}

} // namespace

std::string to_string(Method m)
{
    switch (m) {
    case Method::hlasso: return "hlasso";
    case Method::adaptive_hlasso: return "adaptive_hlasso";
    case Method::lasso: return "lasso";
    case Method::ols: return "ols";
    }
    return "unknown";
}

Method parse_method(const std::string& name)
{
    if (name == "hlasso") return Method::hlasso;
    if (name == "adaptive_hlasso" || name == "adaptive") return Method::adaptive_hlasso;
    if (name == "lasso") return Method::lasso;
    if (name == "ols") return Method::ols;
    throw InputError("unknown method '" + name + "' (expected hlasso, adaptive_hlasso, lasso or ols)");
}

Covariates gen_covariates(Index n, std::mt19937_64& rng)
{
    if (n < 1) throw InputError("need at least one row");
    static const double q1 = boost::math::quantile(boost::math::normal(), 0.25);
    static const double q3 = boost::math::quantile(boost::math::normal(), 0.75);
    std::normal_distribution<double> normal;

    Covariates c{Matrix(n, n_raw), Matrix::Zero(n, n_expanded)};
    std::array<double, n_raw> z{};
    for (Index i = 0; i < n; ++i) {
        for (auto& v : z) v = normal(rng);
        const double w = normal(rng);
        for (Index j = 0; j < n_raw; ++j) {
            double x = (z[static_cast<std::size_t>(j)] + w) / std::sqrt(2.0);
            if (j >= n_continuous) x = x < q1 ? 0.0 : x < 0.0 ? 1.0 : x < q3 ? 2.0 : 3.0;
            c.raw(i, j) = x;
        }
        for (Index j = 0; j < n_continuous; ++j) {
            double p = 1.0;
            for (Index t = 0; t < poly_order; ++t) {
                p *= c.raw(i, j);
                c.expanded(i, j * poly_order + t) = p;
            }
        }
        for (Index j = n_continuous; j < n_raw; ++j) {
            const Index base = n_continuous * poly_order + (j - n_continuous) * n_dummies;
            const auto level = static_cast<Index>(c.raw(i, j));
            if (level < n_dummies) c.expanded(i, base + level) = 1.0;
        }
    }
    return c;
}

Covariates gen_covariates(Index n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return gen_covariates(n, rng);
}

GroupStructure design_groups()
{
    std::vector<GroupSpec> spec;
    Index next = 0;
    for (Index j = 0; j < n_raw; ++j) {
        const Index size = j < n_continuous ? poly_order : n_dummies;
        GroupSpec s{"X" + std::to_string(j + 1), {}};
        for (Index t = 0; t < size; ++t) s.members.push_back(next++);
        spec.push_back(std::move(s));
    }
    return GroupStructure::build(std::move(spec), n_expanded);
}

Vector true_beta(int sim_case)
{
    check_case(sim_case);
    Vector b = Vector::Zero(n_expanded);
    const Index g3 = 2 * poly_order;
    const Index g6 = 5 * poly_order;
    const Index g9 = n_continuous * poly_order;
    if (sim_case == 1) {
        b.segment(g3, 4) << 1.0, 0.5, 0.1, 0.1;
        b.segment(g6, 4) << 1.0, -0.5, 0.15, 0.1;
        b.segment(g9, 3) << 1.0, 1.0, 1.0;
    } else {
        b.segment(g3, 2) << 1.0, 1.0;
        b.segment(g6, 2) << 2.0, -1.5;
        b.segment(g9, 2) << 1.0, 2.0;
    }
    return b;
}

Vector gen_response(const Matrix& expanded, int sim_case, double sigma, std::mt19937_64& rng)
{
    if (!(sigma >= 0.0)) throw InputError("sigma must be non-negative");
    if (expanded.cols() != n_expanded) throw InputError("expanded design must have 56 columns");
    Vector y = expanded * true_beta(sim_case);
    if (sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, sigma);
        for (Index i = 0; i < y.size(); ++i) y(i) += noise(rng);
    }
    return y;
}

Vector gen_response(const Matrix& expanded, int sim_case, double sigma, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return gen_response(expanded, sim_case, sigma, rng);
}

double calibrate_sigma(const Vector& beta, Index mc_n, std::uint64_t seed, double snr)
{
    if (mc_n < 2) throw InputError("Monte Carlo size must be at least 2");
    if (!(snr > 0.0)) throw InputError("signal-to-noise ratio must be positive");
    std::mt19937_64 rng(seed);
    // Chunked so memory stays bounded for large mc_n; Welford update across chunks.
    constexpr Index chunk = 100000;
    double mean = 0.0;
    double m2 = 0.0;
    Index count = 0;
    for (Index done = 0; done < mc_n; done += chunk) {
        const Covariates c = gen_covariates(std::min(chunk, mc_n - done), rng);
        const Vector s = c.expanded * beta;
        for (Index i = 0; i < s.size(); ++i) {
            ++count;
            const double delta = s(i) - mean;
            mean += delta / static_cast<double>(count);
            m2 += delta * (s(i) - mean);
        }
    }
    const double var = m2 / static_cast<double>(count - 1);
    return std::sqrt(var / snr);
}

double calibrate_sigma(int sim_case, Index mc_n, std::uint64_t seed, double snr)
{
    return calibrate_sigma(true_beta(sim_case), mc_n, seed, snr);
}

double model_error(const Matrix& X, const Vector& beta_hat, double intercept, const Vector& beta_true)
{
    if (X.cols() != beta_hat.size() || X.cols() != beta_true.size()) throw InputError("model_error: dimension mismatch");
    const Vector diff = (X * (beta_hat - beta_true)).array() + intercept;
    return diff.squaredNorm() / static_cast<double>(X.rows());
}

double zero_var_pct(const Vector& beta_hat, const Vector& beta_true)
{
    int total = 0;
    int hit = 0;
    for (Index j = 0; j < beta_true.size(); ++j) {
        if (beta_true(j) != 0.0) continue;
        ++total;
        if (beta_hat(j) == 0.0) ++hit;
    }
    return total == 0 ? 100.0 : 100.0 * hit / total;
}

double nonzero_var_pct(const Vector& beta_hat, const Vector& beta_true)
{
    int total = 0;
    int hit = 0;
    for (Index j = 0; j < beta_true.size(); ++j) {
        if (beta_true(j) == 0.0) continue;
        ++total;
        if (beta_hat(j) != 0.0) ++hit;
    }
    return total == 0 ? 100.0 : 100.0 * hit / total;
}

std::vector<double> GridSpec::explicit_grid() const
{
    if (!min || !max) throw InputError("explicit grid needs both min and max");
    if (!(*min > 0.0) || !(*max >= *min)) throw InputError("grid needs 0 < min <= max");
    if (count < 1) throw InputError("grid needs at least one point");
    if (count == 1 || *max == *min) return std::vector<double>(1, *max);
    return log_spaced_grid(*max, count, *min / *max);
}

GridSpec GridSpec::parse(const std::string& text)
{
    std::istringstream in(text);
    std::string a, b, c;
    if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c)) {
        throw InputError("grid spec must look like min:max:count, got '" + text + "'");
    }
    GridSpec g;
    try {
        g.min = std::stod(a);
        g.max = std::stod(b);
        g.count = std::stoi(c);
    } catch (const std::exception&) {
        throw InputError("grid spec must look like min:max:count, got '" + text + "'");
    }
    g.explicit_grid();
    return g;
}

Summary summarize(const std::vector<double>& values)
{
    Summary s;
    if (values.empty()) return s;
    const double n = static_cast<double>(values.size());
    for (double v : values) s.mean += v;
    s.mean /= n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return s;
}

namespace {

struct Candidate
{
    double lambda;
    Vector beta_orig;
    double intercept;
};

/// Index of the smallest validation error; ties keep the earlier (larger) lambda.
std::size_t pick(const std::vector<double>& errors)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < errors.size(); ++i) {
        if (errors[i] < errors[best]) best = i;
    }
    return best;
}

} // namespace

RepResult run_replication(const BenchConfig& cfg, double sigma, int rep)
{
    RepResult r;
    r.rep = rep;
    try {
        auto rng = stream(cfg.seed, static_cast<std::uint64_t>(rep));
        const Vector beta_true = true_beta(cfg.sim_case);
        const Covariates train = gen_covariates(cfg.n_train, rng);
        const Vector y_train = gen_response(train.expanded, cfg.sim_case, sigma, rng);
        const Covariates valid = gen_covariates(cfg.n_valid, rng);
        const Vector y_valid = gen_response(valid.expanded, cfg.sim_case, sigma, rng);
        const Covariates test = gen_covariates(cfg.n_test, rng);

        const StandardizedDataset ds = StandardizedDataset::standardize(train.expanded, y_train);
        const GroupStructure g = design_groups();

        std::vector<Candidate> candidates;
        auto add = [&](double lambda, const Vector& beta_std) {
            const auto orig = destandardize(beta_std, 0.0, ds);
            candidates.push_back({lambda, orig.beta, orig.intercept});
        };

        switch (cfg.method) {
        case Method::ols:
            add(0.0, fit_ols(ds).beta);
            break;
        case Method::lasso: {
            const auto grid = cfg.grid.min ? cfg.grid.explicit_grid()
                                           : lasso_lambda_grid(ds, cfg.grid.count, cfg.grid.ratio);
            Vector warm;
            for (double lambda : grid) {
                const LinearFit f = fit_lasso(ds, lambda, {}, warm, cfg.fit.inner);
                warm = f.beta;
                add(lambda, f.beta);
            }
            break;
        }
        case Method::hlasso:
        case Method::adaptive_hlasso: {
            const Vector w = cfg.method == Method::hlasso ? Vector::Ones(ds.n_vars())
                                                          : make_weights(OlsPowerWeights{cfg.gamma}, ds);
            const auto grid = cfg.grid.min ? cfg.grid.explicit_grid()
                                           : hlasso_lambda_grid(ds, w, cfg.grid.count, cfg.grid.ratio);
            const auto path = fit_path(ds, g, grid, w, cfg.fit);
            for (const auto& f : path) {
                ++r.fits;
                r.ascent_violations += ascent_violations(f.objective_trace);
                if (f.converged) {
                    ++r.converged_fits;
                    if (f.lambda > 0.0) {
                        r.max_identity_residual = std::max(r.max_identity_residual, scale_identity_residual(f, g));
                    }
                }
                add(f.lambda, f.beta);
            }
            break;
        }
        }

        std::vector<double> errors;
        errors.reserve(candidates.size());
        for (const auto& c : candidates) {
            const Vector pred = (valid.expanded * c.beta_orig).array() + c.intercept;
            errors.push_back((y_valid - pred).squaredNorm() / static_cast<double>(y_valid.size()));
        }
        const Candidate& best = candidates[pick(errors)];

        r.lambda = best.lambda;
        r.mse = model_error(test.expanded, best.beta_orig, best.intercept, beta_true);
        r.zero_var_pct = zero_var_pct(best.beta_orig, beta_true);
        r.nonzero_var_pct = nonzero_var_pct(best.beta_orig, beta_true);
        r.selected.resize(static_cast<std::size_t>(n_expanded));
        for (Index j = 0; j < n_expanded; ++j) r.selected[static_cast<std::size_t>(j)] = best.beta_orig(j) != 0.0;
        r.ok = true;
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
    }
    return r;
}

SimReport run_benchmark(const BenchConfig& cfg)
{
    check_case(cfg.sim_case);
    if (cfg.reps < 1) throw InputError("reps must be at least 1");
    cfg.fit.validate();

    SimReport report;
    report.config = cfg;
    report.sigma = cfg.sigma ? *cfg.sigma : calibrate_sigma(cfg.sim_case, cfg.sigma_mc_n, cfg.seed);
    report.reps.resize(static_cast<std::size_t>(cfg.reps));

    unsigned jobs = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs) : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(cfg.reps));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int rep = next++; rep < cfg.reps; rep = next++) {
            report.reps[static_cast<std::size_t>(rep)] = run_replication(cfg, report.sigma, rep);
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    }

    std::vector<double> mse, zero, nonzero;
    for (const auto& r : report.reps) {
        if (!r.ok) {
            ++report.failed_reps;
            continue;
        }
        mse.push_back(r.mse);
        zero.push_back(r.zero_var_pct);
        nonzero.push_back(r.nonzero_var_pct);
    }
    report.mse = summarize(mse);
    report.zero_var_pct = summarize(zero);
    report.nonzero_var_pct = summarize(nonzero);
    return report;
}

} // namespace hlasso::sim
