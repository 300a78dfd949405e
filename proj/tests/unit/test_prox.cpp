#include <gtest/gtest.h>

#include <cmath>

#include <hlasso/errors.hpp>
#include <hlasso/prox.hpp>

#include "generators.hpp"
#include "lattice_oracle.hpp"

using namespace hlasso;

TEST(SoftThreshold, Definition)
{
    EXPECT_EQ(soft_threshold(3.0, 1.0), 2.0);
    EXPECT_EQ(soft_threshold(-0.5, 1.0), 0.0);
    EXPECT_EQ(soft_threshold(-3.0, 1.0), -2.0);
    EXPECT_EQ(soft_threshold(1.0, 1.0), 0.0);
    for (double z : {-2.5, -1e-300, 0.0, 7.25}) EXPECT_EQ(soft_threshold(z, 0.0), z);
}

TEST(WeightedLasso, OrthonormalDesignIsSoftThreshold)
{
    testkit::Gen gen(31);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix Q = gen.orthonormal_centered(12, 4);
        const Vector y = 2.0 * gen.normal_vector(12);
        const double t = gen.uniform(0.0, 1.5);
        LassoSubproblem p{Q, y, Vector::Constant(4, t), {}};
        const Vector a = solve_weighted_lasso(p);
        const Vector b = Q.transpose() * y;
        for (Index j = 0; j < 4; ++j) EXPECT_NEAR(a(j), soft_threshold(b(j), t), 1e-8);
        Vector exact(4);
        for (Index j = 0; j < 4; ++j) exact(j) = soft_threshold(b(j), t);
        EXPECT_LE(kkt_residual(p, exact), 1e-10);
    }
}

TEST(WeightedLasso, OrthonormalTwoDimensionalMatchesLattice)
{
    testkit::Gen gen(32);
    const Matrix Q = gen.orthonormal_centered(8, 2);
    const Vector y = 1.5 * gen.normal_vector(8);
    const Vector pen = Vector::Constant(2, 0.4);
    const auto oracle = testkit::lattice_minimize(Q, y, pen, false);
    const Vector a = solve_weighted_lasso(LassoSubproblem{Q, y, pen, {}});
    EXPECT_LE((a - oracle.argmin).cwiseAbs().maxCoeff(), 2e-3);
}

TEST(WeightedLasso, ZeroPenaltyIsOls)
{
    testkit::Gen gen(33);
    const Matrix X = gen.normal_matrix(3, 3);
    const Vector y = gen.normal_vector(3);
    const Vector a = solve_weighted_lasso(LassoSubproblem{X, y, Vector::Zero(3), {}}, {1e-12, 100000});
    const Vector ols = X.colPivHouseholderQr().solve(y);
    EXPECT_LE((a - ols).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(WeightedLasso, FullShrinkage)
{
    testkit::Gen gen(34);
    const Matrix X = gen.normal_matrix(10, 3);
    const Vector y = gen.normal_vector(10);
    const double top = (X.transpose() * y).cwiseAbs().maxCoeff();
    EXPECT_EQ(solve_weighted_lasso(LassoSubproblem{X, y, Vector::Constant(3, top * 1.01), {}}), Vector::Zero(3));
}

TEST(WeightedLasso, KktAndScaling)
{
    testkit::Gen gen(35);
    for (int trial = 0; trial < 30; ++trial) {
        const Index m = gen.integer(1, 6);
        const Matrix X = gen.normal_matrix(15, m);
        const Vector y = gen.normal_vector(15);
        Vector pen(m);
        for (Index j = 0; j < m; ++j) pen(j) = gen.uniform(0.0, 2.0);
        LassoSubproblem p{X, y, pen, {}};
        const SolverControl ctl{1e-10, 10000};
        const Vector a = solve_weighted_lasso(p, ctl);
        EXPECT_LE(kkt_residual(p, a), 1e-8);

        LassoSubproblem doubled{X, 2.0 * y, 2.0 * pen, {}};
        const Vector a2 = solve_weighted_lasso(doubled, ctl);
        EXPECT_LE((a2 - 2.0 * a).cwiseAbs().maxCoeff(), 1e-7);
        EXPECT_LE(kkt_residual(doubled, 2.0 * a), 1e-7);
    }
}

TEST(WeightedLasso, ZeroSolutionResidualEqualsScore)
{
    testkit::Gen gen(36);
    const Matrix X = gen.normal_matrix(10, 3);
    const Vector y = gen.normal_vector(10);
    LassoSubproblem p{X, y, Vector::Zero(3), {}};
    EXPECT_NEAR(kkt_residual(p, Vector::Zero(3)), (X.transpose() * y).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(WeightedLasso, WarmStartAndNonConvergence)
{
    testkit::Gen gen(37);
    const Matrix X = gen.normal_matrix(20, 5);
    const Vector y = gen.normal_vector(20);
    const Vector pen = Vector::Constant(5, 0.3);
    const Vector cold = solve_weighted_lasso(LassoSubproblem{X, y, pen, {}});
    const Vector warm = solve_weighted_lasso(LassoSubproblem{X, y, pen, cold});
    EXPECT_LE((warm - cold).cwiseAbs().maxCoeff(), 1e-7);

    Matrix C = gen.normal_matrix(20, 1).replicate(1, 2);
    C.col(1) += 1e-4 * gen.normal_vector(20);
    try {
        solve_weighted_lasso(LassoSubproblem{C, y, Vector::Constant(2, 1e-3), {}}, {1e-14, 2});
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_NE(std::string(e.what()).find("max iterations exceeded"), std::string::npos);
        EXPECT_EQ(e.last_iterate().size(), 2);
    }
}

TEST(Garrote, SingleGroupCalculus)
{
    testkit::Gen gen(41);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix x = gen.uniform(0.2, 3.0) * gen.normal_matrix(10, 1);
        const Vector y = gen.uniform(0.0, 3.0) * gen.normal_vector(10);
        const double c = x.squaredNorm();
        const double expected = std::max(((x.transpose() * y)(0) - 1.0) / c, 0.0);
        const Vector d = solve_nonneg_garrote(GarroteSubproblem{x, y, Vector::Ones(1), {}});
        EXPECT_NEAR(d(0), expected, 1e-9);
    }
}

TEST(Garrote, WeakScoresGiveZero)
{
    testkit::Gen gen(42);
    const Matrix Q = gen.orthonormal_centered(10, 3);
    const Vector y = 0.2 * gen.normal_vector(10);
    ASSERT_LT((Q.transpose() * y).maxCoeff(), 1.0);
    EXPECT_EQ(solve_nonneg_garrote(GarroteSubproblem{Q, y, Vector::Ones(3), {}}), Vector::Zero(3));
    const auto oracle = testkit::lattice_minimize(Q, y, Vector::Ones(3), true);
    EXPECT_EQ(oracle.argmin, Vector::Zero(3));
}

TEST(Garrote, ZeroResponse)
{
    testkit::Gen gen(43);
    EXPECT_EQ(solve_nonneg_garrote(GarroteSubproblem{gen.normal_matrix(8, 3), Vector::Zero(8), Vector::Ones(3), {}}),
              Vector::Zero(3));
}

TEST(Garrote, ExactlyNonNegativeAndKkt)
{
    testkit::Gen gen(44);
    for (int trial = 0; trial < 40; ++trial) {
        const Index m = gen.integer(1, 5);
        const Matrix X = gen.normal_matrix(12, m);
        const Vector y = 3.0 * gen.normal_vector(12);
        GarroteSubproblem p{X, y, Vector::Constant(m, gen.uniform(0.0, 2.0)), {}};
        const Vector d = solve_nonneg_garrote(p, {1e-10, 10000});
        for (Index k = 0; k < m; ++k) {
            EXPECT_GE(d(k), 0.0);
            EXPECT_FALSE(std::signbit(d(k)));
        }
        EXPECT_LE(kkt_residual(p, d), 1e-8);
    }
    GarroteSubproblem p{gen.normal_matrix(5, 2), gen.normal_vector(5), Vector::Ones(2), {}};
    Vector neg(2);
    neg << -0.25, 0.0;
    EXPECT_GE(kkt_residual(p, neg), 0.25);
}

TEST(Solvers, SweepsNeverIncreaseObjective)
{
    testkit::Gen gen(45);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix X = gen.normal_matrix(15, 4);
        const Vector y = gen.normal_vector(15);
        const Vector pen = Vector::Constant(4, 0.5);
        LassoSubproblem p{X, y, pen, {}};
        GarroteSubproblem q{X, y, pen, {}};
        double prev_l = lasso_objective(p, Vector::Zero(4));
        double prev_g = garrote_objective(q, Vector::Zero(4));
        for (int sweeps = 1; sweeps <= 8; ++sweeps) {
            Vector a;
            Vector d;
            try {
                a = solve_weighted_lasso(p, {1e-15, sweeps});
            } catch (const ConvergenceError& e) {
                a = e.last_iterate();
            }
            try {
                d = solve_nonneg_garrote(q, {1e-15, sweeps});
            } catch (const ConvergenceError& e) {
                d = e.last_iterate();
            }
            const double fl = lasso_objective(p, a);
            const double fg = garrote_objective(q, d);
            EXPECT_LE(fl, prev_l + 1e-12);
            EXPECT_LE(fg, prev_g + 1e-12);
            prev_l = fl;
            prev_g = fg;
        }
    }
}

TEST(Solvers, GramFormMatchesDesignForm)
{
    testkit::Gen gen(46);
    const Matrix X = gen.normal_matrix(25, 6);
    const Vector y = gen.normal_vector(25);
    const Vector pen = Vector::Constant(6, 0.7);
    const LassoSubproblem p{X, y, pen, {}};
    EXPECT_LE((solve_weighted_lasso(p) - solve_weighted_lasso(to_gram(p))).cwiseAbs().maxCoeff(), 1e-12);
    const GarroteSubproblem q{X, y, pen, {}};
    EXPECT_LE((solve_nonneg_garrote(q) - solve_nonneg_garrote(to_gram(q))).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Solvers, RejectsBadInput)
{
    testkit::Gen gen(47);
    const Matrix X = gen.normal_matrix(5, 2);
    EXPECT_THROW(solve_weighted_lasso(LassoSubproblem{X, Vector::Zero(4), Vector::Ones(2), {}}), InputError);
    EXPECT_THROW(solve_weighted_lasso(LassoSubproblem{X, Vector::Zero(5), -Vector::Ones(2), {}}), InputError);
    EXPECT_THROW(solve_nonneg_garrote(GarroteSubproblem{X, Vector::Zero(5), Vector::Ones(3), {}}), InputError);
    EXPECT_THROW(solve_weighted_lasso(LassoSubproblem{X, Vector::Zero(5), Vector::Ones(2), {}}, {0.0, 10}),
                 InputError);
}
