#pragma once

#include <span>

#include <hlasso/dataset.hpp>
#include <hlasso/group_structure.hpp>
#include <hlasso/logistic.hpp>
#include <hlasso/penalty.hpp>

namespace hlasso {

struct LrtResult
{
    double statistic = 0.0;      ///< T_n, clipped at 0.
    double raw_statistic = 0.0;  ///< Before clipping.
    int q = 0;
    double p_value = 1.0;        ///< Upper tail of chi-square with q degrees of freedom.
    double sup_full = 0.0;       ///< Penalized criterion at the unrestricted fit.
    double sup_null = 0.0;       ///< Penalized criterion with the null coordinates pinned at 0.
    double sigma2 = 1.0;         ///< Gaussian noise variance plug-in (1 for the logistic family).
};

/**
 * Penalized likelihood-ratio statistic for H0: beta_j = 0 for j in
 * null_zero_set, T_n = 2 (sup Q_n - sup_{H0} Q_n).
 *
 * Both fits use the same lambda and weights and are restricted to
 * full_support (all variables when empty). The restricted fit starts from the
 * unrestricted solution with the null coordinates removed. Binary-mode data
 * uses the logistic criterion; Gaussian data uses the least-squares criterion
 * divided by the residual variance of the least-squares fit on full_support.
 *
 * Throws ConvergenceError when either fit fails to converge.
 */
LrtResult lrt_statistic(const StandardizedDataset& ds, const GroupStructure& g, const PenaltySpec& pen,
                        std::span<const Index> full_support, std::span<const Index> null_zero_set,
                        const LogisticOptions& opts = {});

/// P(chi^2_q > x).
double chi_square_sf(double x, int q);

} // namespace hlasso
