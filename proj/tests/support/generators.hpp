#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>

#include <hlasso/dataset.hpp>
#include <hlasso/group_structure.hpp>
#include <hlasso/types.hpp>

namespace hlasso::testkit {

/// Seeded source for hand-rolled property generators.
class Gen
{
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double normal() { return normal_(rng_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

    Matrix normal_matrix(Index rows, Index cols)
    {
        Matrix m(rows, cols);
        for (Index j = 0; j < cols; ++j) {
            for (Index i = 0; i < rows; ++i) m(i, j) = normal();
        }
        return m;
    }

    Vector normal_vector(Index n)
    {
        Vector v(n);
        for (Index i = 0; i < n; ++i) v(i) = normal();
        return v;
    }

    /// Centered columns with exactly orthonormal Gram matrix.
    Matrix orthonormal_centered(Index n, Index p)
    {
        Matrix Z = normal_matrix(n, p);
        Z.rowwise() -= Z.colwise().mean();
        Eigen::HouseholderQR<Matrix> qr(Z);
        return qr.householderQ() * Matrix::Identity(n, p);
    }

    /// Random sizes summing to p, each in [1, max_size].
    std::vector<Index> group_sizes(Index p, Index max_size)
    {
        std::vector<Index> sizes;
        Index left = p;
        while (left > 0) {
            const Index s = std::min<Index>(left, integer(1, static_cast<int>(max_size)));
            sizes.push_back(s);
            left -= s;
        }
        return sizes;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
};

/// Sparse group-structured Gaussian instance.
struct GaussianInstance
{
    StandardizedDataset ds;
    GroupStructure groups;
};

inline GaussianInstance gaussian_instance(Gen& gen, Index n, Index p, Index max_group, double noise = 1.0)
{
    const auto sizes = gen.group_sizes(p, max_group);
    GroupStructure g = GroupStructure::contiguous(sizes);
    const Matrix X = gen.normal_matrix(n, p);
    Vector beta = Vector::Zero(p);
    for (Index k = 0; k < g.n_groups(); ++k) {
        if (!gen.coin(0.6)) continue;
        for (Index j : g.members(k)) {
            if (gen.coin(0.7)) beta(j) = gen.uniform(0.5, 2.0) * (gen.coin() ? 1.0 : -1.0);
        }
    }
    const Vector y = X * beta + noise * gen.normal_vector(n);
    return {StandardizedDataset::standardize(X, y), std::move(g)};
}

} // namespace hlasso::testkit
