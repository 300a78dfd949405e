#include <hlasso/engine.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>

#include <hlasso/errors.hpp>

namespace hlasso {

namespace {

void require_disjoint(const GroupStructure& g, Index n_vars)
{
    if (g.overlapping()) {
        throw InputError("the Gaussian hierarchical lasso needs disjoint groups; use the logistic "
                         "fitter for overlapping structures");
    }
    if (g.n_vars() != n_vars) {
        throw InputError("group structure covers " + std::to_string(g.n_vars()) + " variables, data has " +
                         std::to_string(n_vars));
    }
}

/// Per-variable copy of the group multiplier.
Vector spread(const Vector& d, const GroupStructure& g)
{
    Vector out(g.n_vars());
    for (Index j = 0; j < out.size(); ++j) out(j) = d(g.group_of(j));
    return out;
}

/// P x K matrix with alpha_j in row j, column group(j).
Matrix group_loading(const Vector& alpha, const GroupStructure& g)
{
    Matrix A = Matrix::Zero(g.n_vars(), g.n_groups());
    for (Index j = 0; j < alpha.size(); ++j) A(j, g.group_of(j)) = alpha(j);
    return A;
}

double quadratic_objective(const GramSystem& sys, const Vector& beta)
{
    const double rss = sys.yty - 2.0 * beta.dot(sys.xty) + beta.dot(sys.gram * beta);
    return -0.5 * rss;
}

Vector resolved_weights(const PenaltySpec& pen, Index n_vars)
{
    return pen.weights.size() == 0 ? Vector::Ones(n_vars) : pen.weights;
}

/// Starting (d, alpha) for a cold start: d = 1 and alpha from OLS or marginal
/// regressions.
DAlpha cold_start(const StandardizedDataset& ds, const GroupStructure& g, const FitOptions& opts)
{
    DAlpha s;
    InitMode mode = opts.init;
    if (mode == InitMode::automatic) mode = ds.n() > ds.n_vars() ? InitMode::ols : InitMode::marginal;
    switch (mode) {
    case InitMode::supplied:
        if (opts.init_d.size() != g.n_groups() || opts.init_alpha.size() != ds.n_vars()) {
            throw InputError("supplied initialization has the wrong dimensions");
        }
        if ((opts.init_d.array() < 0.0).any()) throw InputError("supplied d must be non-negative");
        s.d = opts.init_d;
        s.alpha = opts.init_alpha;
        return s;
    case InitMode::ols:
        s.alpha = ols_estimate(ds);
        break;
    case InitMode::marginal:
    case InitMode::automatic:
        // Unit-norm centered columns: the simple regression slope is x_j'y.
        s.alpha = ds.X().transpose() * ds.y();
        break;
    }
    s.d = Vector::Ones(g.n_groups());
    return s;
}

/// Minimizes d_penalty * c d_k + sum_j p_j |alpha_kj| / c over c > 0 for each
/// group, i.e. d_k = sqrt(sum_j p_j |beta_kj| / d_penalty).
void rebalance_groups(Vector& d, Vector& alpha, const GroupStructure& g, const Vector& alpha_penalty,
                      double d_penalty)
{
    if (!(d_penalty > 0.0)) return;
    for (Index k = 0; k < g.n_groups(); ++k) {
        if (!(d(k) > 0.0)) continue;
        double s = 0.0;
        for (Index j : g.members(k)) s += alpha_penalty(j) * std::abs(d(k) * alpha(j));
        if (!(s > 0.0)) continue;
        const double target = std::sqrt(s / d_penalty);
        const double c = target / d(k);
        d(k) = target;
        for (Index j : g.members(k)) alpha(j) /= c;
    }
}

} // namespace

void FitOptions::validate() const
{
    if (!(tol > 0.0)) throw InputError("fit tolerance must be positive");
    if (max_outer_iter < 1) throw InputError("max_outer_iter must be at least 1");
    if (!(inner.tol > 0.0) || inner.max_iter < 1) throw InputError("invalid inner solver control");
}

GramSystem GramSystem::from(const StandardizedDataset& ds)
{
    return GramSystem{ds.X().transpose() * ds.X(), ds.X().transpose() * ds.y(), ds.y().squaredNorm()};
}

HLassoFit fit_alternating(const GramSystem& sys, const GroupStructure& g, const Vector& alpha_penalty,
                          double d_penalty, Vector d0, Vector alpha0, const FitOptions& opts)
{
    opts.validate();
    const Index P = sys.gram.rows();
    require_disjoint(g, P);
    if (alpha_penalty.size() != P || d0.size() != g.n_groups() || alpha0.size() != P) {
        throw InputError("alternating fit: dimension mismatch");
    }
    if (!(d_penalty >= 0.0)) throw InputError("group penalty must be non-negative");

    HLassoFit fit;
    fit.d = std::move(d0);
    fit.alpha = std::move(alpha0);
    if (opts.rebalance) rebalance_groups(fit.d, fit.alpha, g, alpha_penalty, d_penalty);
    fit.beta = spread(fit.d, g).cwiseProduct(fit.alpha);

    auto objective = [&](const Vector& d, const Vector& alpha, const Vector& beta) {
        return quadratic_objective(sys, beta) - d_penalty * d.sum() - alpha_penalty.dot(alpha.cwiseAbs());
    };
    fit.objective_trace.push_back(objective(fit.d, fit.alpha, fit.beta));
    if (opts.record_history) fit.history.push_back({fit.d, fit.alpha});

    const Vector d_pen = Vector::Constant(g.n_groups(), d_penalty);
    for (int m = 1; m <= opts.max_outer_iter; ++m) {
        try {
            // alpha-step: lasso on columns scaled by d_k.
            const Vector dv = spread(fit.d, g);
            GramProblem a_step{dv.asDiagonal() * sys.gram * dv.asDiagonal(), dv.cwiseProduct(sys.xty),
                               alpha_penalty, fit.alpha};
            fit.alpha = solve_weighted_lasso(a_step, opts.inner);

            // d-step: garrote on group pseudo-covariates x_k' alpha_k.
            const Matrix A = group_loading(fit.alpha, g);
            GramProblem d_step{A.transpose() * sys.gram * A, A.transpose() * sys.xty, d_pen, fit.d};
            fit.d = solve_nonneg_garrote(d_step, opts.inner);
            if (opts.rebalance) rebalance_groups(fit.d, fit.alpha, g, alpha_penalty, d_penalty);
        } catch (const ConvergenceError&) {
            fit.beta = spread(fit.d, g).cwiseProduct(fit.alpha);
            fit.iterations = m;
            fit.converged = false;
            return fit;
        }

        Vector beta = spread(fit.d, g).cwiseProduct(fit.alpha);
        const double change = (beta - fit.beta).cwiseAbs().maxCoeff();
        fit.beta = std::move(beta);
        fit.objective_trace.push_back(objective(fit.d, fit.alpha, fit.beta));
        if (opts.record_history) fit.history.push_back({fit.d, fit.alpha});
        fit.iterations = m;
        if (change <= opts.tol) {
            fit.converged = true;
            break;
        }
    }
    return fit;
}

HLassoFit fit_hlasso(const StandardizedDataset& ds, const GroupStructure& g, const PenaltySpec& pen,
                     const FitOptions& opts)
{
    const double lambda = pen.lambda();
    const Vector w = resolved_weights(pen, ds.n_vars());
    PenaltySpec checked = pen;
    checked.weights = w;
    checked.validate(ds.n_vars());
    opts.validate();
    require_disjoint(g, ds.n_vars());

    if (lambda == 0.0 && ds.n() > ds.n_vars()) {
        // The criterion has no maximizer at lambda = 0, only the least-squares
        // supremum approached as d -> 0. Report that limit directly.
        const GramSystem sys = GramSystem::from(ds);
        HLassoFit fit;
        fit.beta = ols_estimate(ds);
        fit.d = Vector::Ones(g.n_groups());
        fit.alpha = fit.beta;
        fit.weights = w;
        fit.objective_trace.push_back(quadratic_objective(sys, fit.beta) - fit.d.sum());
        fit.converged = true;
        fit.intercept = destandardize(fit.beta, 0.0, ds).intercept;
        return fit;
    }

    DAlpha start = cold_start(ds, g, opts);
    HLassoFit fit = fit_alternating(GramSystem::from(ds), g, lambda * w, 1.0, std::move(start.d),
                                    std::move(start.alpha), opts);
    fit.lambda = lambda;
    fit.weights = w;
    fit.intercept = destandardize(fit.beta, 0.0, ds).intercept;
    return fit;
}

double orthogonal_alpha_update(double beta_ols, double d_prev, double lambda_w)
{
    if (!(d_prev > 0.0)) return 0.0;
    const double shrunk = std::abs(beta_ols) / d_prev - lambda_w / (d_prev * d_prev);
    if (!(shrunk > 0.0)) return 0.0;
    return beta_ols > 0.0 ? shrunk : -shrunk;
}

double orthogonal_d_update(const Vector& beta_ols_group, const Vector& alpha_group)
{
    const double ss = alpha_group.squaredNorm();
    if (!(ss > 0.0)) return 0.0;
    double avg = 0.0;
    for (Index j = 0; j < alpha_group.size(); ++j) {
        const double a = alpha_group(j);
        if (a != 0.0) avg += (a * a / ss) * (beta_ols_group(j) / a);
    }
    const double v = avg - 1.0 / ss;
    return v > 0.0 ? v : 0.0;
}

HLassoFit fit_hlasso_orthogonal(const StandardizedDataset& ds, const GroupStructure& g, const PenaltySpec& pen,
                                const FitOptions& opts)
{
    const double lambda = pen.lambda();
    const Vector w = resolved_weights(pen, ds.n_vars());
    PenaltySpec checked = pen;
    checked.weights = w;
    checked.validate(ds.n_vars());
    opts.validate();
    require_disjoint(g, ds.n_vars());

    const GramSystem sys = GramSystem::from(ds);
    const Index P = ds.n_vars();
    const double off = (sys.gram - Matrix::Identity(P, P)).cwiseAbs().maxCoeff();
    if (off > 1e-8) {
        throw InputError("orthogonality precondition failed: max |X'X - I| = " + std::to_string(off));
    }
    const Vector& b_ols = sys.xty;

    DAlpha start = cold_start(ds, g, opts);
    HLassoFit fit;
    fit.d = std::move(start.d);
    fit.alpha = std::move(start.alpha);
    fit.lambda = lambda;
    fit.weights = w;

    const Vector alpha_pen = lambda * w;
    if (opts.rebalance) rebalance_groups(fit.d, fit.alpha, g, alpha_pen, 1.0);
    fit.beta = spread(fit.d, g).cwiseProduct(fit.alpha);
    auto objective = [&]() {
        return quadratic_objective(sys, fit.beta) - fit.d.sum() - alpha_pen.dot(fit.alpha.cwiseAbs());
    };
    fit.objective_trace.push_back(objective());
    if (opts.record_history) fit.history.push_back({fit.d, fit.alpha});

    for (int m = 1; m <= opts.max_outer_iter; ++m) {
        for (Index j = 0; j < P; ++j) {
            fit.alpha(j) = orthogonal_alpha_update(b_ols(j), fit.d(g.group_of(j)), alpha_pen(j));
        }
        for (Index k = 0; k < g.n_groups(); ++k) {
            const auto& members = g.members(k);
            Vector a(static_cast<Index>(members.size()));
            Vector b(a.size());
            for (std::size_t i = 0; i < members.size(); ++i) {
                a(static_cast<Index>(i)) = fit.alpha(members[i]);
                b(static_cast<Index>(i)) = b_ols(members[i]);
            }
            fit.d(k) = orthogonal_d_update(b, a);
        }
        if (opts.rebalance) rebalance_groups(fit.d, fit.alpha, g, alpha_pen, 1.0);
        Vector beta = spread(fit.d, g).cwiseProduct(fit.alpha);
        const double change = (beta - fit.beta).cwiseAbs().maxCoeff();
        fit.beta = std::move(beta);
        fit.objective_trace.push_back(objective());
        if (opts.record_history) fit.history.push_back({fit.d, fit.alpha});
        fit.iterations = m;
        if (change <= opts.tol) {
            fit.converged = true;
            break;
        }
    }
    fit.intercept = destandardize(fit.beta, 0.0, ds).intercept;
    return fit;
}

double objective_beta(const Vector& beta, const StandardizedDataset& ds, const GroupStructure& g,
                      const PenaltySpec& pen)
{
    if (beta.size() != ds.n_vars() || g.n_vars() != ds.n_vars()) {
        throw InputError("objective: dimension mismatch");
    }
    const Vector w = resolved_weights(pen, ds.n_vars());
    const double lambda = pen.lambda();
    double penalty = 0.0;
    for (Index k = 0; k < g.n_groups(); ++k) {
        double s = 0.0;
        for (Index j : g.members(k)) s += w(j) * std::abs(beta(j));
        penalty += std::sqrt(s);
    }
    return -0.5 * (ds.y() - ds.X() * beta).squaredNorm() - 2.0 * std::sqrt(lambda) * penalty;
}

double objective_d_alpha(const Vector& d, const Vector& alpha, const StandardizedDataset& ds,
                         const GroupStructure& g, const PenaltySpec& pen)
{
    if (d.size() != g.n_groups() || alpha.size() != ds.n_vars()) throw InputError("objective: dimension mismatch");
    require_disjoint(g, ds.n_vars());
    const Vector w = resolved_weights(pen, ds.n_vars());
    const Vector beta = spread(d, g).cwiseProduct(alpha);
    return -0.5 * (ds.y() - ds.X() * beta).squaredNorm() - d.sum() -
           pen.lambda() * w.dot(alpha.cwiseAbs());
}

DAlpha recover_d_alpha(const Vector& beta, const GroupStructure& g, double lambda, const Vector& weights)
{
    if (!(lambda > 0.0)) throw InputError("recover_d_alpha needs lambda > 0");
    if (beta.size() != g.n_vars()) throw InputError("recover_d_alpha: dimension mismatch");
    const Vector w = weights.size() == 0 ? Vector::Ones(beta.size()) : weights;
    DAlpha out{Vector::Zero(g.n_groups()), Vector::Zero(beta.size())};
    for (Index k = 0; k < g.n_groups(); ++k) {
        double s = 0.0;
        for (Index j : g.members(k)) s += w(j) * std::abs(beta(j));
        if (s == 0.0) continue;
        const double dk = std::sqrt(lambda * s);
        out.d(k) = dk;
        for (Index j : g.members(k)) out.alpha(j) = beta(j) / dk;
    }
    return out;
}

double scale_identity_residual(const HLassoFit& fit, const GroupStructure& g)
{
    const DAlpha r = recover_d_alpha(fit.beta, g, fit.lambda, fit.weights);
    return (r.d - fit.d).cwiseAbs().maxCoeff();
}

int ascent_violations(const std::vector<double>& trace, double slack)
{
    int count = 0;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i] < trace[i - 1] - slack) ++count;
    }
    return count;
}

std::vector<double> log_spaced_grid(double top, int count, double ratio)
{
    if (count < 1) throw InputError("grid needs at least one point");
    if (!(ratio > 0.0 && ratio < 1.0)) throw InputError("grid ratio must lie in (0, 1)");
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        grid[static_cast<std::size_t>(i)] = top * std::pow(ratio, t);
    }
    return grid;
}

std::vector<double> hlasso_lambda_grid(const StandardizedDataset& ds, const Vector& weights, int count,
                                       double ratio)
{
    const Vector w = weights.size() == 0 ? Vector::Ones(ds.n_vars()) : weights;
    const Vector score = (ds.X().transpose() * ds.y()).cwiseAbs().cwiseQuotient(w);
    const double s = score.maxCoeff();
    if (!(s > 0.0)) throw InputError("response is orthogonal to every column; no lambda grid");
    return log_spaced_grid(std::max(s * s, s), count, ratio);
}

std::vector<HLassoFit> fit_path(const StandardizedDataset& ds, const GroupStructure& g,
                                const std::vector<double>& lambda_grid, const Vector& weights,
                                const FitOptions& opts)
{
    for (std::size_t i = 1; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] < lambda_grid[i - 1])) throw InputError("lambda grid must be strictly descending");
    }
    const Vector w = weights.size() == 0 ? Vector::Ones(ds.n_vars()) : weights;
    const GramSystem sys = GramSystem::from(ds);
    const DAlpha cold = cold_start(ds, g, opts);

    std::vector<HLassoFit> path;
    path.reserve(lambda_grid.size());
    for (double lambda : lambda_grid) {
        PenaltySpec pen{{lambda}, w, UnitWeights{}};
        if (path.empty() || lambda == 0.0) {
            path.push_back(fit_hlasso(ds, g, pen, opts));
            continue;
        }
        pen.validate(ds.n_vars());
        const HLassoFit& prev = path.back();
        Vector d = prev.d;
        Vector alpha = prev.alpha;
        for (Index k = 0; k < g.n_groups(); ++k) {
            if (d(k) > 0.0) continue;
            d(k) = cold.d(k);
            for (Index j : g.members(k)) alpha(j) = cold.alpha(j);
        }
        HLassoFit fit = fit_alternating(sys, g, lambda * w, 1.0, std::move(d), std::move(alpha), opts);
        fit.lambda = lambda;
        fit.weights = w;
        fit.intercept = destandardize(fit.beta, 0.0, ds).intercept;
        path.push_back(std::move(fit));
    }
    return path;
}

TwoParameterReport check_two_parameter_equivalence(const StandardizedDataset& ds, const GroupStructure& g, double lambda1,
                                      double lambda2, const FitOptions& opts)
{
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw InputError("lambda1 and lambda2 must be positive");
    require_disjoint(g, ds.n_vars());
    const GramSystem sys = GramSystem::from(ds);
    const DAlpha start = cold_start(ds, g, opts);
    const Vector ones = Vector::Ones(ds.n_vars());

    TwoParameterReport r;
    // Same starting beta: (d, alpha) for the two-parameter form is (d / lambda1, lambda1 alpha).
    r.two_parameter = fit_alternating(sys, g, lambda2 * ones, lambda1, start.d / lambda1, lambda1 * start.alpha, opts);
    r.single = fit_alternating(sys, g, (lambda1 * lambda2) * ones, 1.0, start.d, start.alpha, opts);
    r.single.lambda = lambda1 * lambda2;
    r.single.weights = ones;
    r.two_parameter.lambda = lambda1 * lambda2;
    r.two_parameter.weights = ones;

    r.max_beta_difference = (r.two_parameter.beta - r.single.beta).cwiseAbs().maxCoeff();
    r.max_rescale_difference = std::max((lambda1 * r.two_parameter.d - r.single.d).cwiseAbs().maxCoeff(),
                                        (r.two_parameter.alpha / lambda1 - r.single.alpha).cwiseAbs().maxCoeff());
    r.objective_two_parameter = r.two_parameter.objective();
    r.objective_single = r.single.objective();
    r.both_converged = r.two_parameter.converged && r.single.converged;
    return r;
}

LinearFit fit_ols(const StandardizedDataset& ds)
{
    LinearFit fit;
    fit.beta = ols_estimate(ds);
    fit.intercept = destandardize(fit.beta, 0.0, ds).intercept;
    return fit;
}

LinearFit fit_lasso(const StandardizedDataset& ds, double lambda, const Vector& weights, const Vector& warm,
                    SolverControl ctl)
{
    if (!(lambda >= 0.0)) throw InputError("lambda must be >= 0");
    const Vector w = weights.size() == 0 ? Vector::Ones(ds.n_vars()) : weights;
    GramProblem p{ds.X().transpose() * ds.X(), ds.X().transpose() * ds.y(), lambda * w, warm};
    LinearFit fit;
    fit.lambda = lambda;
    fit.beta = solve_weighted_lasso(p, ctl);
    fit.intercept = destandardize(fit.beta, 0.0, ds).intercept;
    return fit;
}

std::vector<double> lasso_lambda_grid(const StandardizedDataset& ds, int count, double ratio)
{
    const double top = (ds.X().transpose() * ds.y()).cwiseAbs().maxCoeff();
    if (!(top > 0.0)) throw InputError("response is orthogonal to every column; no lambda grid");
    return log_spaced_grid(top, count, ratio);
}

} // namespace hlasso
