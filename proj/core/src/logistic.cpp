#include <hlasso/logistic.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/QR>

#include <hlasso/errors.hpp>
#include <hlasso/prox.hpp>

namespace hlasso {

namespace {

double log1pexp(double x)
{
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x)
{
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// J x K loading with alpha_j wherever variable j sits in group k.
Matrix overlap_loading(const Vector& alpha, const GroupStructure& g)
{
    Matrix A = Matrix::Zero(g.n_vars(), g.n_groups());
    for (Index k = 0; k < g.n_groups(); ++k) {
        for (Index j : g.members(k)) A(j, k) = alpha(j);
    }
    return A;
}

enum class Block { lasso, garrote };

/**
 * Proximal Newton ascent on l(b + Z theta) - penalty(theta) with an
 * unpenalized intercept b. Each quadratic model is solved by the coordinate
 * descent solvers on the weighted, weighted-centered design; steps are
 * backtracked until the penalized log-likelihood does not decrease.
 */
void newton_block(Block kind, const Matrix& Z, const Vector& y, const Vector& pen, const GlmControl& glm,
                  const SolverControl& inner, double& b, Vector& theta)
{
    auto penalty = [&](const Vector& t) {
        return kind == Block::lasso ? pen.dot(t.cwiseAbs()) : pen.dot(t);
    };
    Vector eta = (Z * theta).array() + b;
    double f = logistic_loglik(eta, y) - penalty(theta);

    const Index n = Z.rows();
    Vector p(n), W(n), z(n);
    for (int it = 0; it < glm.max_iter; ++it) {
        for (Index i = 0; i < n; ++i) {
            p(i) = sigmoid(eta(i));
            W(i) = std::max(p(i) * (1.0 - p(i)), glm.weight_floor);
            z(i) = eta(i) + (y(i) - p(i)) / W(i);
        }
        const double sw = W.sum();
        const double zbar = W.dot(z) / sw;
        const Vector zmean = (Z.transpose() * W) / sw;
        Matrix Zc = Z.rowwise() - zmean.transpose();
        const Vector sqw = W.cwiseSqrt();
        Zc = sqw.asDiagonal() * Zc;
        const Vector zc = sqw.cwiseProduct((z.array() - zbar).matrix());

        GramProblem q{Zc.transpose() * Zc, Zc.transpose() * zc, pen, theta};
        const Vector target = kind == Block::lasso ? solve_weighted_lasso(q, inner) : solve_nonneg_garrote(q, inner);
        const double b_target = zbar - zmean.dot(target);

        const Vector dtheta = target - theta;
        const double db = b_target - b;
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h < 40; ++h, t *= 0.5) {
            const Vector cand = theta + t * dtheta;
            const double cb = b + t * db;
            const Vector ceta = (Z * cand).array() + cb;
            const double fc = logistic_loglik(ceta, y) - penalty(cand);
            if (fc >= f) {
                theta = cand;
                if (kind == Block::garrote) theta = theta.cwiseMax(0.0);
                b = cb;
                eta = ceta;
                f = fc;
                accepted = true;
                break;
            }
        }
        if (!accepted) return;
        const double step = t * std::max(dtheta.size() ? dtheta.cwiseAbs().maxCoeff() : 0.0, std::abs(db));
        if (step <= glm.tol) return;
    }
}

void check_inputs(const StandardizedDataset& ds, const GroupStructure& g)
{
    if (ds.mode() != ResponseMode::binary) throw InputError("logistic fit needs a binary-mode dataset");
    if (g.n_vars() != ds.n_vars()) {
        throw InputError("group structure covers " + std::to_string(g.n_vars()) + " variables, data has " +
                         std::to_string(ds.n_vars()));
    }
}

Vector resolved(const Vector& w, Index n)
{
    return w.size() == 0 ? Vector::Ones(n) : w;
}

struct LogisticStart
{
    double intercept;
    Vector alpha;
    Vector d;
};

LogisticStart cold_start(const StandardizedDataset& ds, const GroupStructure& g, const LogisticOptions& opts)
{
    if (opts.fit.init == InitMode::supplied) {
        if (opts.fit.init_d.size() != g.n_groups() || opts.fit.init_alpha.size() != ds.n_vars()) {
            throw InputError("supplied initialization has the wrong dimensions");
        }
        if ((opts.fit.init_d.array() < 0.0).any()) throw InputError("supplied d must be non-negative");
        return {opts.init_intercept, opts.fit.init_alpha, opts.fit.init_d};
    }
    const double ybar = ds.y().mean();
    if (!(ybar > 0.0 && ybar < 1.0)) throw InputError("binary response has a single class");
    const double w0 = ybar * (1.0 - ybar);
    const Vector resid = ds.y().array() - ybar;

    // One Newton step away from the intercept-only model.
    InitMode mode = opts.fit.init;
    if (mode == InitMode::automatic) mode = ds.n() > ds.n_vars() ? InitMode::ols : InitMode::marginal;
    Vector beta0 = mode == InitMode::ols ? Vector(ds.X().colPivHouseholderQr().solve(resid) / w0)
                                         : Vector(ds.X().transpose() * resid / w0);

    LogisticStart s{std::log(ybar / (1.0 - ybar)), Vector(), Vector::Ones(g.n_groups())};
    s.alpha = beta0.cwiseQuotient(variable_multipliers(s.d, g));
    return s;
}

/// Groups linked by shared variables. Scaling every d_k of a component by c
/// and its alpha_j by 1/c leaves beta unchanged.
std::vector<std::vector<Index>> overlap_components(const GroupStructure& g)
{
    std::vector<Index> parent(static_cast<std::size_t>(g.n_groups()));
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index k) {
        while (parent[static_cast<std::size_t>(k)] != k) {
            parent[static_cast<std::size_t>(k)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(k)])];
            k = parent[static_cast<std::size_t>(k)];
        }
        return k;
    };
    for (Index j = 0; j < g.n_vars(); ++j) {
        const auto& in = g.memberships(j);
        for (std::size_t i = 1; i < in.size(); ++i) parent[static_cast<std::size_t>(find(in[i]))] = find(in[0]);
    }
    std::vector<std::vector<Index>> out;
    std::vector<Index> slot(parent.size(), -1);
    for (Index k = 0; k < g.n_groups(); ++k) {
        const auto r = static_cast<std::size_t>(find(k));
        if (slot[r] < 0) {
            slot[r] = static_cast<Index>(out.size());
            out.emplace_back();
        }
        out[static_cast<std::size_t>(slot[r])].push_back(k);
    }
    return out;
}

LogisticHLassoFit run_logistic(const StandardizedDataset& ds, const GroupStructure& g, double lambda,
                               const Vector& w, LogisticStart start, const LogisticOptions& opts)
{
    const Matrix& X = ds.X();
    const Vector& y = ds.y();
    const Vector alpha_pen = lambda * w;
    const Vector d_pen = Vector::Ones(g.n_groups());

    LogisticHLassoFit fit;
    fit.lambda = lambda;
    fit.weights = w;
    fit.intercept = start.intercept;
    fit.alpha = std::move(start.alpha);
    fit.d = std::move(start.d);
    const std::vector<std::vector<Index>> components = overlap_components(g);
    auto rebalance = [&]() {
        if (!opts.fit.rebalance) return;
        for (const auto& comp : components) {
            double sd = 0.0;
            double sa = 0.0;
            std::vector<Index> vars;
            for (Index k : comp) {
                sd += fit.d(k);
                vars.insert(vars.end(), g.members(k).begin(), g.members(k).end());
            }
            std::sort(vars.begin(), vars.end());
            vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
            for (Index j : vars) sa += alpha_pen(j) * std::abs(fit.alpha(j));
            if (!(sd > 0.0) || !(sa > 0.0)) continue;
            const double c = std::sqrt(sa / sd);
            for (Index k : comp) fit.d(k) *= c;
            for (Index j : vars) fit.alpha(j) /= c;
        }
    };
    rebalance();
    fit.beta = fit.alpha.cwiseProduct(variable_multipliers(fit.d, g));

    auto objective = [&]() {
        const Vector eta = (X * fit.beta).array() + fit.intercept;
        return logistic_loglik(eta, y) - fit.d.sum() - alpha_pen.dot(fit.alpha.cwiseAbs());
    };
    fit.objective_trace.push_back(objective());

    for (int m = 1; m <= opts.fit.max_outer_iter; ++m) {
        const Vector old_beta = fit.beta;
        const double old_b = fit.intercept;
        try {
            const Vector D = variable_multipliers(fit.d, g);
            newton_block(Block::lasso, X * D.asDiagonal(), y, alpha_pen, opts.glm, opts.fit.inner, fit.intercept,
                         fit.alpha);
            const Matrix U = X * overlap_loading(fit.alpha, g);
            newton_block(Block::garrote, U, y, d_pen, opts.glm, opts.fit.inner, fit.intercept, fit.d);
            rebalance();
        } catch (const ConvergenceError& e) {
            fit.beta = fit.alpha.cwiseProduct(variable_multipliers(fit.d, g));
            fit.iterations = m;
            fit.diagnostic = e.what();
            break;
        }
        fit.beta = fit.alpha.cwiseProduct(variable_multipliers(fit.d, g));
        fit.objective_trace.push_back(objective());
        fit.iterations = m;

        if (!fit.beta.allFinite() || fit.beta.cwiseAbs().maxCoeff() > 1e8) {
            fit.diagnostic = "coefficients diverging; the classes look separable at this lambda";
            break;
        }
        const double change = std::max((fit.beta - old_beta).cwiseAbs().maxCoeff(), std::abs(fit.intercept - old_b));
        if (change <= opts.fit.tol) {
            fit.converged = true;
            break;
        }
    }
    if (!fit.converged && fit.diagnostic.empty()) {
        fit.diagnostic = "outer iteration limit reached";
    }

    fit.linear_predictor = (X * fit.beta).array() + fit.intercept;
    fit.loglik = logistic_loglik(fit.linear_predictor, y);
    if (fit.converged && fit.linear_predictor.cwiseAbs().maxCoeff() > 30.0 && fit.loglik > -1e-6) {
        fit.converged = false;
        fit.diagnostic = "separation: fitted probabilities saturate at 0/1";
    }
    return fit;
}

} // namespace

double logistic_loglik(const Vector& eta, const Vector& y)
{
    if (eta.size() != y.size()) throw InputError("logistic_loglik: length mismatch");
    double sum = 0.0;
    for (Index i = 0; i < eta.size(); ++i) sum += y(i) * eta(i) - log1pexp(eta(i));
    return sum;
}

Vector variable_multipliers(const Vector& d, const GroupStructure& g)
{
    Vector D = Vector::Zero(g.n_vars());
    for (Index k = 0; k < g.n_groups(); ++k) {
        for (Index j : g.members(k)) D(j) += d(k);
    }
    return D;
}

Vector logistic_linear_predictor(const Matrix& X, const GroupStructure& g, double intercept, const Vector& alpha,
                                 const Vector& d)
{
    return (X * alpha.cwiseProduct(variable_multipliers(d, g))).array() + intercept;
}

LogisticGradient logistic_gradient(const StandardizedDataset& ds, const GroupStructure& g, double intercept,
                                   const Vector& alpha, const Vector& d)
{
    const Vector eta = logistic_linear_predictor(ds.X(), g, intercept, alpha, d);
    Vector resid(eta.size());
    for (Index i = 0; i < eta.size(); ++i) resid(i) = ds.y()(i) - sigmoid(eta(i));
    const Vector xr = ds.X().transpose() * resid;
    LogisticGradient grad;
    grad.intercept = resid.sum();
    grad.alpha = xr.cwiseProduct(variable_multipliers(d, g));
    grad.d = overlap_loading(alpha, g).transpose() * xr;
    return grad;
}

double logistic_objective(const StandardizedDataset& ds, const GroupStructure& g, const PenaltySpec& pen,
                          double intercept, const Vector& alpha, const Vector& d)
{
    const Vector w = resolved(pen.weights, ds.n_vars());
    const Vector eta = logistic_linear_predictor(ds.X(), g, intercept, alpha, d);
    return logistic_loglik(eta, ds.y()) - d.sum() - pen.lambda() * w.dot(alpha.cwiseAbs());
}

LogisticHLassoFit fit_logistic_hlasso(const StandardizedDataset& ds, const GroupStructure& g,
                                      const PenaltySpec& pen, const LogisticOptions& opts)
{
    check_inputs(ds, g);
    opts.fit.validate();
    const double lambda = pen.lambda();
    PenaltySpec checked = pen;
    checked.weights = resolved(pen.weights, ds.n_vars());
    checked.validate(ds.n_vars());
    return run_logistic(ds, g, lambda, checked.weights, cold_start(ds, g, opts), opts);
}

Vector predict_proba(const LogisticHLassoFit& fit, const Matrix& X_std)
{
    if (X_std.cols() != fit.beta.size()) {
        throw InputError("expected " + std::to_string(fit.beta.size()) + " columns, got " +
                         std::to_string(X_std.cols()));
    }
    Vector eta = (X_std * fit.beta).array() + fit.intercept;
    return eta.unaryExpr([](double e) { return sigmoid(e); });
}

std::vector<LogisticHLassoFit> fit_logistic_path(const StandardizedDataset& ds, const GroupStructure& g,
                                                 const std::vector<double>& lambda_grid, const Vector& weights,
                                                 const LogisticOptions& opts)
{
    check_inputs(ds, g);
    opts.fit.validate();
    for (std::size_t i = 1; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] < lambda_grid[i - 1])) throw InputError("lambda grid must be strictly descending");
    }
    const Vector w = resolved(weights, ds.n_vars());
    const LogisticStart cold = cold_start(ds, g, opts);

    std::vector<LogisticHLassoFit> path;
    for (double lambda : lambda_grid) {
        PenaltySpec{{lambda}, w, UnitWeights{}}.validate(ds.n_vars());
        LogisticStart start = cold;
        if (!path.empty()) {
            const auto& prev = path.back();
            start.intercept = prev.intercept;
            start.d = prev.d;
            start.alpha = prev.alpha;
            for (Index k = 0; k < g.n_groups(); ++k) {
                if (start.d(k) > 0.0) continue;
                start.d(k) = cold.d(k);
                for (Index j : g.members(k)) {
                    if (start.alpha(j) == 0.0) start.alpha(j) = cold.alpha(j);
                }
            }
        }
        path.push_back(run_logistic(ds, g, lambda, w, std::move(start), opts));
    }
    return path;
}

std::vector<double> logistic_lambda_grid(const StandardizedDataset& ds, const Vector& weights, int count,
                                         double ratio)
{
    const Vector w = resolved(weights, ds.n_vars());
    const Vector resid = ds.y().array() - ds.y().mean();
    const double s = (ds.X().transpose() * resid).cwiseAbs().cwiseQuotient(w).maxCoeff();
    if (!(s > 0.0)) throw InputError("response is orthogonal to every column; no lambda grid");
    return log_spaced_grid(std::max(s * s, s), count, ratio);
}

} // namespace hlasso
