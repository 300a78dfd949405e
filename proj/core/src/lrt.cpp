#include <hlasso/lrt.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include <hlasso/engine.hpp>
#include <hlasso/errors.hpp>

namespace hlasso {

namespace {

struct Restricted
{
    StandardizedDataset ds;
    GroupStructure g;
    PenaltySpec pen;
};

Restricted restrict(const StandardizedDataset& ds, const GroupStructure& g, const PenaltySpec& pen,
                    const std::vector<Index>& keep)
{
    Vector w(static_cast<Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) w(static_cast<Index>(i)) = pen.weights(keep[i]);
    return {ds.select_columns(keep), g.restrict_to(keep), PenaltySpec{pen.lambdas, w, pen.recipe}};
}

/// Maps each group of `to` onto the group with the same id in `from`.
Vector carry_d(const Vector& d, const GroupStructure& from, const GroupStructure& to)
{
    Vector out(to.n_groups());
    for (Index k = 0; k < to.n_groups(); ++k) {
        for (Index l = 0; l < from.n_groups(); ++l) {
            if (from.id(l) == to.id(k)) {
                out(k) = d(l);
                break;
            }
        }
    }
    return out;
}

} // namespace

double chi_square_sf(double x, int q)
{
    if (q < 1) throw InputError("chi-square needs at least one degree of freedom");
    if (x <= 0.0) return 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(q), x));
}

LrtResult lrt_statistic(const StandardizedDataset& ds, const GroupStructure& g, const PenaltySpec& pen_in,
                        std::span<const Index> full_support, std::span<const Index> null_zero_set,
                        const LogisticOptions& opts)
{
    PenaltySpec pen = pen_in;
    if (pen.weights.size() == 0) pen.weights = Vector::Ones(ds.n_vars());
    pen.validate(ds.n_vars());
    (void)pen.lambda();  // throws unless exactly one lambda

    std::vector<Index> full(full_support.begin(), full_support.end());
    if (full.empty()) {
        full.resize(static_cast<std::size_t>(ds.n_vars()));
        for (Index j = 0; j < ds.n_vars(); ++j) full[static_cast<std::size_t>(j)] = j;
    }
    std::sort(full.begin(), full.end());
    if (std::adjacent_find(full.begin(), full.end()) != full.end()) throw InputError("full support repeats an index");

    const std::set<Index> nulls(null_zero_set.begin(), null_zero_set.end());
    if (nulls.empty()) throw InputError("null set must name at least one coordinate");
    std::vector<Index> keep_null;      // positions in the original numbering
    std::vector<Index> keep_null_pos;  // positions within `full`
    for (std::size_t i = 0; i < full.size(); ++i) {
        if (nulls.count(full[i]) == 0) {
            keep_null.push_back(full[i]);
            keep_null_pos.push_back(static_cast<Index>(i));
        }
    }
    if (keep_null.size() + nulls.size() != full.size()) throw InputError("null set must be a subset of the full support");
    if (keep_null.empty()) throw InputError("null hypothesis would remove every variable");

    const Restricted rf = restrict(ds, g, pen, full);
    const Restricted rn = restrict(ds, g, pen, keep_null);

    LrtResult out;
    out.q = static_cast<int>(nulls.size());

    if (ds.mode() == ResponseMode::binary) {
        const LogisticHLassoFit ff = fit_logistic_hlasso(rf.ds, rf.g, rf.pen, opts);
        if (!ff.converged) {
            throw ConvergenceError("unrestricted logistic fit did not converge: " + ff.diagnostic, ff.beta);
        }
        LogisticOptions warm = opts;
        warm.fit.init = InitMode::supplied;
        warm.fit.init_d = carry_d(ff.d, rf.g, rn.g);
        warm.fit.init_alpha = Vector(static_cast<Index>(keep_null_pos.size()));
        for (std::size_t i = 0; i < keep_null_pos.size(); ++i) {
            warm.fit.init_alpha(static_cast<Index>(i)) = ff.alpha(keep_null_pos[i]);
        }
        warm.init_intercept = ff.intercept;
        const LogisticHLassoFit fn = fit_logistic_hlasso(rn.ds, rn.g, rn.pen, warm);
        if (!fn.converged) {
            throw ConvergenceError("restricted logistic fit did not converge: " + fn.diagnostic, fn.beta);
        }
        out.sup_full = ff.penalized_loglik();
        out.sup_null = fn.penalized_loglik();
        out.raw_statistic = 2.0 * (out.sup_full - out.sup_null);
    } else {
        const Index p_full = rf.ds.n_vars();
        if (ds.n() <= p_full + 1) throw InputError("Gaussian LRT needs n > |full support| + 1");
        const Vector ols = ols_estimate(rf.ds);
        out.sigma2 = (rf.ds.y() - rf.ds.X() * ols).squaredNorm() / static_cast<double>(ds.n() - p_full - 1);
        if (!(out.sigma2 > 0.0)) throw InputError("least-squares fit is exact; residual variance is zero");

        const FitOptions& fo = opts.fit;
        const HLassoFit ff = fit_hlasso(rf.ds, rf.g, rf.pen, fo);
        if (!ff.converged) throw ConvergenceError("unrestricted fit did not converge", ff.beta);
        FitOptions warm = fo;
        warm.init = InitMode::supplied;
        warm.init_d = carry_d(ff.d, rf.g, rn.g);
        warm.init_alpha = Vector(static_cast<Index>(keep_null_pos.size()));
        for (std::size_t i = 0; i < keep_null_pos.size(); ++i) {
            warm.init_alpha(static_cast<Index>(i)) = ff.alpha(keep_null_pos[i]);
        }
        const HLassoFit fn = fit_hlasso(rn.ds, rn.g, rn.pen, warm);
        if (!fn.converged) throw ConvergenceError("restricted fit did not converge", fn.beta);
        out.sup_full = objective_beta(ff.beta, rf.ds, rf.g, rf.pen) / out.sigma2;
        out.sup_null = objective_beta(fn.beta, rn.ds, rn.g, rn.pen) / out.sigma2;
        out.raw_statistic = 2.0 * (out.sup_full - out.sup_null);
    }
    out.statistic = std::max(out.raw_statistic, 0.0);
    out.p_value = chi_square_sf(out.statistic, out.q);
    return out;
}

} // namespace hlasso
