#pragma once

#include <optional>
#include <vector>

#include <hlasso/dataset.hpp>
#include <hlasso/group_structure.hpp>
#include <hlasso/penalty.hpp>
#include <hlasso/prox.hpp>
#include <hlasso/types.hpp>

namespace hlasso {

enum class InitMode {
    automatic,  ///< ols when n > P, marginal otherwise
    ols,
    marginal,
    supplied,
};

struct FitOptions
{
    double tol = 1e-7;          ///< Stop when max |beta^(m) - beta^(m-1)| <= tol.
    int max_outer_iter = 500;
    InitMode init = InitMode::automatic;
    Vector init_d;              ///< Used with InitMode::supplied.
    Vector init_alpha;          ///< Used with InitMode::supplied.
    SolverControl inner{1e-10, 10000};
    bool record_history = false;  ///< Keep every (d, alpha) iterate.
    /// After each d-step, move every group to the best point of its scale
    /// ridge (c d_k, alpha_k / c), which leaves beta unchanged.
    bool rebalance = true;

    void validate() const;
};

/// One (d, alpha) iterate of the alternating scheme.
struct Iterate
{
    Vector d;
    Vector alpha;
};

struct HLassoFit
{
    Vector d;                    ///< Group multipliers, length K, all >= 0.
    Vector alpha;                ///< Within-group effects, length P.
    Vector beta;                 ///< d_k * alpha_kj on the standardized scale.
    double intercept = 0.0;      ///< Original data scale.
    double lambda = 0.0;
    Vector weights;
    std::vector<double> objective_trace;  ///< Maximization objective, starts at the initial point.
    int iterations = 0;
    bool converged = false;
    std::vector<Iterate> history;         ///< Filled when FitOptions::record_history is set.

    double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

/// Sufficient statistics of a standardized Gaussian problem.
struct GramSystem
{
    Matrix gram;
    Vector xty;
    double yty = 0.0;

    static GramSystem from(const StandardizedDataset& ds);
};

/**
 * Alternating maximization of
 *
 *   -1/2 RSS(d, alpha) - d_penalty * sum_k d_k - sum_kj alpha_penalty_kj |alpha_kj|,  d >= 0,
 *
 * on Gram data. With d_penalty = 1 and alpha_penalty = lambda * w this is the
 * single-parameter hierarchical lasso criterion; other d_penalty values give
 * the two-parameter form. The starting point is taken as given.
 */
HLassoFit fit_alternating(const GramSystem& sys, const GroupStructure& g, const Vector& alpha_penalty,
                          double d_penalty, Vector d0, Vector alpha0, const FitOptions& opts);

/// Disjoint-group hierarchical lasso at a single lambda.
HLassoFit fit_hlasso(const StandardizedDataset& ds, const GroupStructure& g, const PenaltySpec& pen,
                     const FitOptions& opts = {});

/// Closed-form alternating updates for an orthonormal design. Throws
/// InputError("orthogonality precondition failed ...") when X'X != I.
HLassoFit fit_hlasso_orthogonal(const StandardizedDataset& ds, const GroupStructure& g,
                                const PenaltySpec& pen, const FitOptions& opts = {});

/// Orthonormal-design alpha update for one variable:
/// 1(d > 0) * sgn(b) * (|b| / d - lambda w / d^2)_+.
double orthogonal_alpha_update(double beta_ols, double d_prev, double lambda_w);

/// Orthonormal-design d update for one group: the shrunken weighted average of
/// beta_ols_j / alpha_j with weights alpha_j^2, or 0 when alpha == 0.
double orthogonal_d_update(const Vector& beta_ols_group, const Vector& alpha_group);

/// -1/2 RSS(beta) - 2 sqrt(lambda) sum_k sqrt(sum_j w_kj |beta_kj|).
double objective_beta(const Vector& beta, const StandardizedDataset& ds, const GroupStructure& g,
                      const PenaltySpec& pen);

/// The d/alpha objective (maximization form) evaluated directly from the data.
double objective_d_alpha(const Vector& d, const Vector& alpha, const StandardizedDataset& ds,
                         const GroupStructure& g, const PenaltySpec& pen);

struct DAlpha
{
    Vector d;
    Vector alpha;
};

/// d_k = sqrt(lambda sum_j w_kj |beta_kj|), alpha_k = beta_k / d_k (0 when d_k = 0).
DAlpha recover_d_alpha(const Vector& beta, const GroupStructure& g, double lambda,
                       const Vector& weights = {});

/// max_k |d_k - sqrt(lambda sum_j w_kj |beta_kj|)| for a fit.
double scale_identity_residual(const HLassoFit& fit, const GroupStructure& g);

/// Number of consecutive decreases larger than `slack` in a maximization trace.
int ascent_violations(const std::vector<double>& trace, double slack = 1e-9);

/// `count` values from top down to top * ratio, evenly spaced in log scale.
std::vector<double> log_spaced_grid(double top, int count, double ratio);

/// lambda_max = max(s^2, s) with s = max_j |x_j'y| / w_j, then `count`
/// log-spaced values down to lambda_max * ratio.
std::vector<double> hlasso_lambda_grid(const StandardizedDataset& ds, const Vector& weights,
                                       int count = 50, double ratio = 1e-4);

/// Fits a strictly descending grid, warm-starting each fit from the previous
/// one. Groups killed at a larger lambda restart from the default
/// initialization so they can re-enter.
std::vector<HLassoFit> fit_path(const StandardizedDataset& ds, const GroupStructure& g,
                                const std::vector<double>& lambda_grid, const Vector& weights,
                                const FitOptions& opts = {});

struct TwoParameterReport
{
    double max_beta_difference = 0.0;
    double objective_two_parameter = 0.0;   ///< criterion with (lambda1, lambda2)
    double objective_single = 0.0;          ///< criterion with lambda1 * lambda2
    double max_rescale_difference = 0.0;    ///< max over (lambda1 d - d', alpha / lambda1 - alpha')
    bool both_converged = false;
    HLassoFit two_parameter;
    HLassoFit single;
};

/// Runs the two-parameter and single-parameter alternating schemes from the
/// same starting beta and compares the results.
TwoParameterReport check_two_parameter_equivalence(const StandardizedDataset& ds, const GroupStructure& g,
                                      double lambda1, double lambda2, const FitOptions& opts = {});

/// Plain linear fit (lasso or least squares) on standardized data.
struct LinearFit
{
    Vector beta;              ///< Standardized scale.
    double intercept = 0.0;   ///< Original scale.
    double lambda = 0.0;
};

LinearFit fit_ols(const StandardizedDataset& ds);
LinearFit fit_lasso(const StandardizedDataset& ds, double lambda, const Vector& weights = {},
                    const Vector& warm = {}, SolverControl ctl = {1e-10, 10000});
std::vector<double> lasso_lambda_grid(const StandardizedDataset& ds, int count = 50, double ratio = 1e-4);

} // namespace hlasso
