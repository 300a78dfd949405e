#include <hlasso/prox.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <hlasso/errors.hpp>

namespace hlasso {

namespace {

void check_dims(const GramProblem& p)
{
    const Index m = p.gram.rows();
    if (p.gram.cols() != m || p.xty.size() != m || p.penalty.size() != m) {
        throw InputError("subproblem dimensions are inconsistent");
    }
    if (p.init.size() != 0 && p.init.size() != m) {
        throw InputError("warm start has length " + std::to_string(p.init.size()) + ", expected " +
                         std::to_string(m));
    }
    if ((p.penalty.array() < 0.0).any() || !p.penalty.allFinite()) {
        throw InputError("penalties must be finite and non-negative");
    }
}

struct LassoUpdate
{
    double operator()(double z, double pen, double diag) const { return soft_threshold(z, pen) / diag; }
};

struct GarroteUpdate
{
    double operator()(double z, double pen, double diag) const
    {
        const double v = (z - pen) / diag;
        return v > 0.0 ? v : 0.0;
    }
};

/// Cyclic coordinate descent on 1/2 x'Gx - x'c + sum pen_j |x_j| (or the
/// non-negative variant). grad tracks c - Gx.
template <class Update, class Kkt>
Vector coordinate_descent(const GramProblem& p, SolverControl ctl, Update update, Kkt kkt,
                          const char* name)
{
    check_dims(p);
    if (!(ctl.tol > 0.0)) throw InputError("solver tolerance must be positive");
    const Index m = p.gram.rows();
    Vector x = p.init.size() == m ? p.init : Vector::Zero(m);
    if constexpr (std::is_same_v<Update, GarroteUpdate>) {
        x = x.cwiseMax(0.0);
    }
    Vector grad = p.xty - p.gram * x;

    auto visit = [&](Index j) {
        const double diag = p.gram(j, j);
        const double old = x(j);
        const double next = diag > 0.0 ? update(grad(j) + diag * old, p.penalty(j), diag) : 0.0;
        const double delta = next - old;
        if (delta != 0.0) {
            x(j) = next;
            grad.noalias() -= p.gram.col(j) * delta;
        }
        return std::abs(delta);
    };

    std::vector<Index> active;
    active.reserve(static_cast<std::size_t>(m));
    int sweeps = 0;
    while (sweeps < ctl.max_iter) {
        double change = 0.0;
        for (Index j = 0; j < m; ++j) change = std::max(change, visit(j));
        ++sweeps;
        if (change <= ctl.tol) {
            grad = p.xty - p.gram * x;
            if (kkt(p, x) <= ctl.tol) return x;
            continue;
        }
        active.clear();
        for (Index j = 0; j < m; ++j) {
            if (x(j) != 0.0) active.push_back(j);
        }
        while (sweeps < ctl.max_iter) {
            double inner = 0.0;
            for (Index j : active) inner = std::max(inner, visit(j));
            ++sweeps;
            if (inner <= ctl.tol) break;
        }
    }
    throw ConvergenceError(std::string(name) + ": max iterations exceeded (" + std::to_string(ctl.max_iter) +
                               " sweeps)",
                           x);
}

double garrote_violation(double g, double pen, double d)
{
    if (d < 0.0) return -d;
    if (d == 0.0) return std::max(g - pen, 0.0);
    return std::abs(g - pen);
}

double lasso_violation(double g, double pen, double a)
{
    if (a == 0.0) return std::max(std::abs(g) - pen, 0.0);
    return std::abs(g - (a > 0.0 ? pen : -pen));
}

} // namespace

GramProblem to_gram(const LassoSubproblem& p)
{
    if (p.X.rows() != p.y.size()) throw InputError("lasso subproblem: X rows and y length differ");
    return GramProblem{p.X.transpose() * p.X, p.X.transpose() * p.y, p.penalty, p.init};
}

GramProblem to_gram(const GarroteSubproblem& p)
{
    if (p.Xtilde.rows() != p.y.size()) throw InputError("garrote subproblem: Xtilde rows and y length differ");
    return GramProblem{p.Xtilde.transpose() * p.Xtilde, p.Xtilde.transpose() * p.y, p.penalty, p.init};
}

double lasso_kkt_residual(const GramProblem& p, const Vector& a)
{
    check_dims(p);
    if (a.size() != p.gram.rows()) throw InputError("solution dimension mismatch");
    const Vector g = p.xty - p.gram * a;
    double worst = 0.0;
    for (Index j = 0; j < a.size(); ++j) worst = std::max(worst, lasso_violation(g(j), p.penalty(j), a(j)));
    return worst;
}

double garrote_kkt_residual(const GramProblem& p, const Vector& d)
{
    check_dims(p);
    if (d.size() != p.gram.rows()) throw InputError("solution dimension mismatch");
    const Vector g = p.xty - p.gram * d;
    double worst = 0.0;
    for (Index k = 0; k < d.size(); ++k) worst = std::max(worst, garrote_violation(g(k), p.penalty(k), d(k)));
    return worst;
}

double kkt_residual(const LassoSubproblem& p, const Vector& solution)
{
    return lasso_kkt_residual(to_gram(p), solution);
}

double kkt_residual(const GarroteSubproblem& p, const Vector& solution)
{
    return garrote_kkt_residual(to_gram(p), solution);
}

Vector solve_weighted_lasso(const GramProblem& p, SolverControl ctl)
{
    return coordinate_descent(p, ctl, LassoUpdate{}, lasso_kkt_residual, "weighted lasso");
}

Vector solve_weighted_lasso(const LassoSubproblem& p, SolverControl ctl)
{
    return solve_weighted_lasso(to_gram(p), ctl);
}

Vector solve_nonneg_garrote(const GramProblem& p, SolverControl ctl)
{
    return coordinate_descent(p, ctl, GarroteUpdate{}, garrote_kkt_residual, "non-negative garrote");
}

Vector solve_nonneg_garrote(const GarroteSubproblem& p, SolverControl ctl)
{
    return solve_nonneg_garrote(to_gram(p), ctl);
}

double lasso_objective(const LassoSubproblem& p, const Vector& a)
{
    return 0.5 * (p.y - p.X * a).squaredNorm() + p.penalty.dot(a.cwiseAbs());
}

double garrote_objective(const GarroteSubproblem& p, const Vector& d)
{
    return 0.5 * (p.y - p.Xtilde * d).squaredNorm() + p.penalty.dot(d);
}

} // namespace hlasso
