#include <gtest/gtest.h>

#include <cmath>

#include <hlasso/errors.hpp>
#include <hlasso/penalty.hpp>

#include "generators.hpp"

using namespace hlasso;

TEST(AdaptiveWeights, UnitPilotGivesUnitWeights)
{
    for (double gamma : {0.5, 1.0, 2.0}) {
        EXPECT_EQ(adaptive_weights(Vector::Ones(4), gamma), Vector::Ones(4));
    }
}

TEST(AdaptiveWeights, Reciprocal)
{
    Vector pilot(2);
    pilot << 2.0, 0.5;
    const Vector w = adaptive_weights(pilot, 1.0, 1e-8);
    EXPECT_DOUBLE_EQ(w(0), 0.5);
    EXPECT_DOUBLE_EQ(w(1), 2.0);
}

TEST(AdaptiveWeights, FloorCapsZeroPilot)
{
    Vector pilot(2);
    pilot << 0.0, -0.0;
    const Vector w = adaptive_weights(pilot, 2.0, 1e-4);
    EXPECT_TRUE(w.allFinite());
    EXPECT_DOUBLE_EQ(w(0), 1e8);
}

TEST(PenaltySpec, Validation)
{
    EXPECT_NO_THROW(PenaltySpec::plain(0.0, 3).validate(3));
    EXPECT_THROW(PenaltySpec::plain(-1.0, 3).validate(3), InputError);
    PenaltySpec bad = PenaltySpec::plain(1.0, 3);
    bad.weights(1) = 0.0;
    EXPECT_THROW(bad.validate(3), InputError);
    bad.weights(1) = INFINITY;
    EXPECT_THROW(bad.validate(3), InputError);
    EXPECT_THROW(PenaltySpec::plain(1.0, 2).validate(3), InputError);
    PenaltySpec two{{1.0, 2.0}, Vector::Ones(3), UnitWeights{}};
    EXPECT_THROW((void)two.lambda(), InputError);
    PenaltySpec neg_gamma{{1.0}, Vector::Ones(3), OlsPowerWeights{-1.0}};
    EXPECT_THROW(neg_gamma.validate(3), InputError);
}

TEST(Pilots, OlsMatchesNormalEquationsAndRidgeShrinks)
{
    testkit::Gen gen(21);
    const auto ds = StandardizedDataset::standardize(gen.normal_matrix(40, 4), gen.normal_vector(40));
    const Vector ols = ols_estimate(ds);
    const Matrix G = ds.X().transpose() * ds.X();
    EXPECT_LE((G * ols - ds.X().transpose() * ds.y()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(ridge_estimate(ds, 5.0).norm(), ols.norm());
    EXPECT_LE((make_weights(OlsPowerWeights{1.0}, ds) - adaptive_weights(ols, 1.0)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(make_weights(UnitWeights{}, ds), Vector::Ones(4));

    const auto wide = StandardizedDataset::standardize(gen.normal_matrix(3, 5), gen.normal_vector(3));
    EXPECT_THROW(ols_estimate(wide), InputError);
    EXPECT_TRUE(ridge_estimate(wide, 1.0).allFinite());
}
