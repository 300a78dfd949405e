#pragma once

#include <array>
#include <cmath>
#include <limits>

#include <hlasso/types.hpp>

namespace hlasso::testkit {

/// Exhaustive coarse-to-fine lattice minimizer of
///   1/2 ||y - X a||^2 + sum_j penalty_j |a_j|
/// over the box [lo, hi]^m, m <= 3. Steps 0.1, 0.01, 0.001; each refinement
/// searches +-1 coarse step around the incumbent. With nonneg = true the box
/// is [0, hi] and the penalty is linear (the garrote).
struct LatticeResult
{
    Vector argmin;
    double value = 0.0;
    bool on_boundary = false;  ///< Incumbent touches the box edge (other than 0 for nonneg).
};

inline LatticeResult lattice_minimize(const Matrix& X, const Vector& y, const Vector& penalty, bool nonneg,
                                      double bound = 5.0)
{
    const Index m = X.cols();
    const Matrix G = X.transpose() * X;
    const Vector c = X.transpose() * y;
    const double yy = y.squaredNorm();
    auto f = [&](const std::array<double, 3>& a) {
        double quad = 0.0;
        double lin = 0.0;
        double pen = 0.0;
        for (Index i = 0; i < m; ++i) {
            for (Index j = 0; j < m; ++j) quad += a[static_cast<std::size_t>(i)] * G(i, j) * a[static_cast<std::size_t>(j)];
            lin += a[static_cast<std::size_t>(i)] * c(i);
            pen += penalty(i) * std::abs(a[static_cast<std::size_t>(i)]);
        }
        return 0.5 * quad - lin + 0.5 * yy + pen;
    };

    const double lo = nonneg ? 0.0 : -bound;
    const double hi = bound;
    std::array<double, 3> best{0.0, 0.0, 0.0};
    double best_val = std::numeric_limits<double>::infinity();

    std::array<double, 3> center{0.0, 0.0, 0.0};
    std::array<double, 3> from{lo, lo, lo};
    std::array<double, 3> to{hi, hi, hi};
    for (const double step : {0.1, 0.01, 0.001}) {
        std::array<long, 3> count{1, 1, 1};
        for (Index i = 0; i < m; ++i) {
            const auto s = static_cast<std::size_t>(i);
            count[s] = std::lround((to[s] - from[s]) / step) + 1;
        }
        std::array<double, 3> a{0.0, 0.0, 0.0};
        for (long i0 = 0; i0 < count[0]; ++i0) {
            a[0] = m > 0 ? from[0] + static_cast<double>(i0) * step : 0.0;
            for (long i1 = 0; i1 < count[1]; ++i1) {
                a[1] = m > 1 ? from[1] + static_cast<double>(i1) * step : 0.0;
                for (long i2 = 0; i2 < count[2]; ++i2) {
                    a[2] = m > 2 ? from[2] + static_cast<double>(i2) * step : 0.0;
                    const double v = f(a);
                    if (v < best_val) {
                        best_val = v;
                        best = a;
                    }
                }
            }
        }
        center = best;
        for (std::size_t s = 0; s < 3; ++s) {
            from[s] = std::max(lo, center[s] - step);
            to[s] = std::min(hi, center[s] + step);
        }
    }

    LatticeResult r;
    r.argmin.resize(m);
    r.value = best_val;
    for (Index i = 0; i < m; ++i) {
        const double v = best[static_cast<std::size_t>(i)];
        r.argmin(i) = v;
        if (std::abs(v - hi) < 1e-9 || (!nonneg && std::abs(v - lo) < 1e-9)) r.on_boundary = true;
    }
    return r;
}

} // namespace hlasso::testkit
