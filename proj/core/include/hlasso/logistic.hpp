#pragma once

#include <string>
#include <vector>

#include <hlasso/dataset.hpp>
#include <hlasso/engine.hpp>
#include <hlasso/group_structure.hpp>
#include <hlasso/penalty.hpp>
#include <hlasso/types.hpp>

namespace hlasso {

/// Controls for the iteratively reweighted half-steps of the logistic fit.
struct GlmControl
{
    double tol = 1e-7;            ///< Max parameter change of one Newton step.
    int max_iter = 100;
    double weight_floor = 1e-6;   ///< Lower bound on p(1 - p).
};

struct LogisticOptions
{
    FitOptions fit;               ///< Outer tolerance, iteration cap, inner solver control.
    GlmControl glm;
    double init_intercept = 0.0;  ///< Used with InitMode::supplied.
};

/**
 * Logistic hierarchical lasso with possibly overlapping groups:
 *
 *   max  sum_i l(b + sum_k d_k sum_{j in G_k} alpha_j x_ij, y_i) - sum_k d_k - lambda sum_j w_j |alpha_j|
 *
 * subject to d >= 0, where alpha_j is shared by every group containing j.
 */
struct LogisticHLassoFit
{
    Vector d;
    Vector alpha;             ///< One intrinsic effect per variable.
    Vector beta;              ///< Effective coefficient alpha_j * sum_{k containing j} d_k.
    double intercept = 0.0;   ///< Standardized scale.
    Vector linear_predictor;  ///< On the training rows.
    double lambda = 0.0;
    Vector weights;
    double loglik = 0.0;
    std::vector<double> objective_trace;  ///< Penalized log-likelihood per outer iteration.
    int iterations = 0;
    bool converged = false;
    std::string diagnostic;

    double penalized_loglik() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

/// sum_i [y_i eta_i - log(1 + exp(eta_i))], overflow-safe.
double logistic_loglik(const Vector& eta, const Vector& y);

/// D_j = sum of d_k over the groups containing variable j.
Vector variable_multipliers(const Vector& d, const GroupStructure& g);

Vector logistic_linear_predictor(const Matrix& X, const GroupStructure& g, double intercept, const Vector& alpha,
                                 const Vector& d);

struct LogisticGradient
{
    double intercept = 0.0;
    Vector alpha;
    Vector d;
};

/// Gradient of the unpenalized log-likelihood in (intercept, alpha, d).
LogisticGradient logistic_gradient(const StandardizedDataset& ds, const GroupStructure& g, double intercept,
                                   const Vector& alpha, const Vector& d);

/// Penalized log-likelihood of a (intercept, alpha, d) point.
double logistic_objective(const StandardizedDataset& ds, const GroupStructure& g, const PenaltySpec& pen,
                          double intercept, const Vector& alpha, const Vector& d);

LogisticHLassoFit fit_logistic_hlasso(const StandardizedDataset& ds, const GroupStructure& g,
                                      const PenaltySpec& pen, const LogisticOptions& opts = {});

/// 1 / (1 + exp(-eta)) for rows already on the standardized scale.
Vector predict_proba(const LogisticHLassoFit& fit, const Matrix& X_std);

/// Fits each lambda of a strictly descending grid, warm-starting from the
/// previous solution (dead groups restart at d = 1).
std::vector<LogisticHLassoFit> fit_logistic_path(const StandardizedDataset& ds, const GroupStructure& g,
                                                 const std::vector<double>& lambda_grid, const Vector& weights,
                                                 const LogisticOptions& opts = {});

/// Same construction as the Gaussian grid, on the score X'(y - ybar).
std::vector<double> logistic_lambda_grid(const StandardizedDataset& ds, const Vector& weights, int count = 50,
                                         double ratio = 1e-4);

} // namespace hlasso
