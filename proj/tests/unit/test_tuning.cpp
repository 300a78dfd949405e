#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <hlasso/errors.hpp>
#include <hlasso/tuning.hpp>

#include "generators.hpp"

using namespace hlasso;
using testkit::Gen;

namespace {

struct Problem
{
    Matrix X;
    Vector y;
    GroupStructure g;
};

Problem gaussian_problem(Gen& gen, Index n)
{
    Matrix X = gen.normal_matrix(n, 6);
    Vector y = 2.0 * X.col(0) - X.col(1) + gen.normal_vector(n);
    return {X, y, GroupStructure::contiguous(std::vector<Index>{2, 2, 2})};
}

} // namespace

TEST(MakeFolds, BalancedAndDeterministic)
{
    Vector y = Vector::Zero(23);
    const auto folds = make_folds(y, 5, false, 3);
    ASSERT_EQ(folds.size(), 23u);
    for (int f = 0; f < 5; ++f) {
        const auto c = std::count(folds.begin(), folds.end(), f);
        EXPECT_TRUE(c == 4 || c == 5);
    }
    EXPECT_EQ(folds, make_folds(y, 5, false, 3));
    EXPECT_NE(folds, make_folds(y, 5, false, 4));
}

TEST(MakeFolds, StratifiedKeepsClassShares)
{
    Vector y(40);
    for (Index i = 0; i < 40; ++i) y(i) = i < 10 ? 1.0 : 0.0;
    const auto folds = make_folds(y, 5, true, 9);
    for (int f = 0; f < 5; ++f) {
        int ones = 0;
        int total = 0;
        for (Index i = 0; i < 40; ++i) {
            if (folds[static_cast<std::size_t>(i)] != f) continue;
            ++total;
            ones += y(i) == 1.0;
        }
        EXPECT_EQ(total, 8);
        EXPECT_EQ(ones, 2);
    }
}

TEST(TuneKfold, SingleLambdaIsReturned)
{
    Gen gen(401);
    const auto p = gaussian_problem(gen, 50);
    TuneConfig cfg;
    cfg.grid = {0.37};
    const auto r = tune_kfold(p.X, p.y, p.g, cfg);
    EXPECT_EQ(r.lambda, 0.37);
    ASSERT_EQ(r.cv_mean.size(), 1u);
}

TEST(TuneKfold, DuplicatesAndTiesGoToLargerLambda)
{
    Gen gen(402);
    const auto p = gaussian_problem(gen, 50);
    TuneConfig cfg;
    cfg.method = sim::Method::lasso;
    // Both values kill every coefficient, so their losses tie exactly.
    cfg.grid = {1e6, 0.5, 1e7, 1e6};
    const auto r = tune_kfold(p.X, p.y, p.g, cfg);
    ASSERT_EQ(r.grid, cfg.grid);
    EXPECT_EQ(r.cv_mean[0], r.cv_mean[2]);
    EXPECT_EQ(r.cv_mean[0], r.cv_mean[3]);
    EXPECT_EQ(r.lambda, 0.5);

    TuneConfig tie;
    tie.method = sim::Method::lasso;
    tie.grid = {1e6, 1e7};
    EXPECT_EQ(tune_kfold(p.X, p.y, p.g, tie).lambda, 1e7);
}

TEST(TuneKfold, NullModelLossMatchesHandComputation)
{
    Gen gen(403);
    const auto p = gaussian_problem(gen, 37);
    TuneConfig cfg;
    cfg.method = sim::Method::lasso;
    cfg.k = 4;
    cfg.seed = 12;
    cfg.grid = {1e9};
    const auto r = tune_kfold(p.X, p.y, p.g, cfg);
    const auto folds = make_folds(p.y, 4, false, 12);
    std::vector<double> losses;
    for (int f = 0; f < 4; ++f) {
        double sum = 0.0;
        int count = 0;
        for (Index i = 0; i < 37; ++i) {
            if (folds[static_cast<std::size_t>(i)] != f) {
                sum += p.y(i);
                ++count;
            }
        }
        const double mean = sum / count;
        double loss = 0.0;
        int held = 0;
        for (Index i = 0; i < 37; ++i) {
            if (folds[static_cast<std::size_t>(i)] == f) {
                loss += (p.y(i) - mean) * (p.y(i) - mean);
                ++held;
            }
        }
        losses.push_back(loss / held);
    }
    double m = 0.0;
    for (double l : losses) m += l;
    m /= 4.0;
    EXPECT_NEAR(r.cv_mean[0], m, 1e-10 * m);
}

TEST(TuneKfold, ReproducibleAndPicksAReasonableLambda)
{
    Gen gen(404);
    const auto p = gaussian_problem(gen, 80);
    TuneConfig cfg;
    const auto a = tune_kfold(p.X, p.y, p.g, cfg);
    const auto b = tune_kfold(p.X, p.y, p.g, cfg);
    EXPECT_EQ(a.cv_mean, b.cv_mean);
    EXPECT_EQ(a.lambda, b.lambda);
    EXPECT_EQ(a.grid.size(), 50u);
    const auto best = std::min_element(a.cv_mean.begin(), a.cv_mean.end());
    EXPECT_EQ(a.lambda, a.grid[static_cast<std::size_t>(best - a.cv_mean.begin())]);
    EXPECT_LT(*best, a.cv_mean.front());
}

TEST(TuneKfold, BinaryRefoldsUntilEveryTrainingFoldHasBothClasses)
{
    Gen gen(405);
    Matrix X = gen.normal_matrix(30, 4);
    Vector y = Vector::Zero(30);
    y(3) = 1.0;
    y(17) = 1.0;
    TuneConfig cfg;
    cfg.mode = ResponseMode::binary;
    cfg.k = 3;
    cfg.grid = {1.0, 0.1};
    const auto g = GroupStructure::contiguous(std::vector<Index>{2, 2});
    const auto r = tune_kfold(X, y, g, cfg);
    EXPECT_EQ(r.cv_mean.size(), 2u);
    for (double v : r.cv_mean) EXPECT_TRUE(std::isfinite(v));

    Vector single = Vector::Zero(30);
    single(0) = 1.0;
    EXPECT_THROW(tune_kfold(X, single, g, cfg), InputError);
}

TEST(TuneKfold, InputErrors)
{
    Gen gen(406);
    const auto p = gaussian_problem(gen, 20);
    TuneConfig ols;
    ols.method = sim::Method::ols;
    EXPECT_THROW(tune_kfold(p.X, p.y, p.g, ols), InputError);
    TuneConfig k1;
    k1.k = 1;
    EXPECT_THROW(tune_kfold(p.X, p.y, p.g, k1), InputError);
    TuneConfig big;
    big.k = 21;
    EXPECT_THROW(tune_kfold(p.X, p.y, p.g, big), InputError);
    TuneConfig neg;
    neg.grid = {1.0, -1.0};
    EXPECT_THROW(tune_kfold(p.X, p.y, p.g, neg), InputError);
}
