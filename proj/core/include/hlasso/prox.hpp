#pragma once

#include <hlasso/types.hpp>

namespace hlasso {

/// sgn(z) * max(|z| - t, 0). Ties (|z| == t) give exactly 0.
inline double soft_threshold(double z, double t) noexcept
{
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

/// min 1/2 ||y - X a||^2 + sum_j penalty_j |a_j|.
struct LassoSubproblem
{
    Matrix X;
    Vector y;
    Vector penalty;
    Vector init;  ///< Warm start; empty means zeros.
};

/// min 1/2 ||y - Xtilde d||^2 + sum_k penalty_k d_k subject to d >= 0.
struct GarroteSubproblem
{
    Matrix Xtilde;
    Vector y;
    Vector penalty;
    Vector init;  ///< Warm start; empty means zeros.
};

/// Quadratic data in Gram form: gram = X'X, xty = X'y. Solvers work on this
/// form so callers that already hold a Gram matrix skip the n-dimensional
/// work.
struct GramProblem
{
    Matrix gram;
    Vector xty;
    Vector penalty;
    Vector init;
};

struct SolverControl
{
    double tol = 1e-8;         ///< Max coefficient change per sweep, and KKT slack.
    int max_iter = 10000;      ///< Full coordinate sweeps.
};

GramProblem to_gram(const LassoSubproblem& p);
GramProblem to_gram(const GarroteSubproblem& p);

/// Cyclic coordinate descent with an active-set inner loop. Throws
/// ConvergenceError ("max iterations exceeded") carrying the last iterate.
Vector solve_weighted_lasso(const LassoSubproblem& p, SolverControl ctl = {});
Vector solve_weighted_lasso(const GramProblem& p, SolverControl ctl = {});

/// Projected coordinate descent; the result is exactly non-negative.
Vector solve_nonneg_garrote(const GarroteSubproblem& p, SolverControl ctl = {});
Vector solve_nonneg_garrote(const GramProblem& p, SolverControl ctl = {});

/// Largest subgradient-optimality violation. For the lasso with g = X'(y - Xa):
/// |g_j| - pen_j (clipped at 0) where a_j = 0, |g_j - pen_j sgn(a_j)| otherwise.
double kkt_residual(const LassoSubproblem& p, const Vector& solution);
double lasso_kkt_residual(const GramProblem& p, const Vector& solution);

/// Garrote analogue: max(g_k - pen_k, 0) where d_k = 0, |g_k - pen_k| where
/// d_k > 0, and any negative d_k counts as a violation of its magnitude.
double kkt_residual(const GarroteSubproblem& p, const Vector& solution);
double garrote_kkt_residual(const GramProblem& p, const Vector& solution);

/// Penalized least-squares objectives (minimization form, constant 1/2 y'y
/// dropped for the Gram variants).
double lasso_objective(const LassoSubproblem& p, const Vector& a);
double garrote_objective(const GarroteSubproblem& p, const Vector& d);

} // namespace hlasso
