#include <gtest/gtest.h>

#include <cmath>

#include <hlasso/dataset.hpp>
#include <hlasso/errors.hpp>

#include "generators.hpp"

using namespace hlasso;

TEST(Standardize, HandComputedColumn)
{
    Matrix X(3, 1);
    X << 1, 2, 3;
    Vector y(3);
    y << 1, 2, 3;
    const auto ds = StandardizedDataset::standardize(X, y);
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(ds.X()(0, 0), -r, 1e-15);
    EXPECT_NEAR(ds.X()(1, 0), 0.0, 1e-15);
    EXPECT_NEAR(ds.X()(2, 0), r, 1e-15);
    EXPECT_NEAR(ds.y()(0), -1.0, 1e-15);
    EXPECT_NEAR(ds.y()(1), 0.0, 1e-15);
    EXPECT_NEAR(ds.y()(2), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(ds.y_mean(), 2.0);
}

TEST(Standardize, ColumnsCenteredWithUnitNorm)
{
    testkit::Gen gen(3);
    const Matrix X = 3.0 * gen.normal_matrix(30, 5).array() + 7.0;
    const auto ds = StandardizedDataset::standardize(X, gen.normal_vector(30));
    for (Index j = 0; j < 5; ++j) {
        EXPECT_NEAR(ds.X().col(j).mean(), 0.0, 1e-10);
        EXPECT_NEAR(ds.X().col(j).norm(), 1.0, 1e-10);
    }
    EXPECT_NEAR(ds.y().mean(), 0.0, 1e-12);
}

TEST(Standardize, IdempotentOnStandardizedInput)
{
    testkit::Gen gen(4);
    const auto first = StandardizedDataset::standardize(gen.normal_matrix(20, 4), gen.normal_vector(20));
    const auto second = StandardizedDataset::standardize(first.X(), first.y());
    EXPECT_LE((second.X() - first.X()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((second.y() - first.y()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Standardize, RejectsDegenerateAndNonFinite)
{
    Matrix X(3, 2);
    X << 5, 1, 5, 2, 5, 3;
    const Vector y = Vector::LinSpaced(3, 0, 1);
    try {
        StandardizedDataset::standardize(X, y);
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("degenerate column"), std::string::npos);
    }
    Matrix Xn(3, 1);
    Xn << 1, NAN, 3;
    EXPECT_THROW(StandardizedDataset::standardize(Xn, y), InputError);
    Matrix Xi(3, 1);
    Xi << 1, INFINITY, 3;
    EXPECT_THROW(StandardizedDataset::standardize(Xi, y), InputError);
    EXPECT_THROW(StandardizedDataset::standardize(Matrix::Ones(1, 1), Vector::Ones(1)), InputError);
}

TEST(Standardize, BinaryModeKeepsResponse)
{
    testkit::Gen gen(5);
    Vector y(6);
    y << 0, 1, 1, 0, 1, 0;
    const auto ds = StandardizedDataset::standardize(gen.normal_matrix(6, 2), y, ResponseMode::binary);
    EXPECT_EQ(ds.y(), y);
    Vector bad = y;
    bad(0) = 0.5;
    EXPECT_THROW(StandardizedDataset::standardize(gen.normal_matrix(6, 2), bad, ResponseMode::binary), InputError);
}

TEST(Destandardize, NullModelGivesResponseMean)
{
    testkit::Gen gen(6);
    const Vector y = gen.normal_vector(10).array() + 4.0;
    const auto ds = StandardizedDataset::standardize(gen.normal_matrix(10, 3), y);
    const auto o = destandardize(Vector::Zero(3), 0.0, ds);
    EXPECT_EQ(o.beta, Vector::Zero(3));
    EXPECT_NEAR(o.intercept, y.mean(), 1e-14);
}

TEST(Destandardize, IdentityStandardization)
{
    testkit::Gen gen(7);
    const Matrix Q = gen.orthonormal_centered(12, 3);
    Vector y = gen.normal_vector(12);
    y.array() -= y.mean();
    const auto ds = StandardizedDataset::standardize(Q, y);
    const Vector beta = gen.normal_vector(3);
    const auto o = destandardize(beta, 0.0, ds);
    EXPECT_LE((o.beta - beta).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(o.intercept, 0.0, 1e-12);
}

TEST(Destandardize, RawAndStandardizedPredictionsAgree)
{
    testkit::Gen gen(8);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix X = 2.0 * gen.normal_matrix(5, 3).array() + gen.uniform(-3, 3);
        const Vector y = gen.normal_vector(5).array() + 1.5;
        const auto ds = StandardizedDataset::standardize(X, y);
        const Vector beta = gen.normal_vector(3);
        const auto o = destandardize(beta, 0.0, ds);
        const Vector raw = (X * o.beta).array() + o.intercept;
        const Vector std_pred = (ds.X() * beta).array() + ds.y_mean();
        EXPECT_LE((raw - std_pred).cwiseAbs().maxCoeff(), 1e-10);
    }
    const auto ds = StandardizedDataset::standardize(gen.normal_matrix(5, 3), gen.normal_vector(5));
    EXPECT_THROW(destandardize(Vector::Zero(2), 0.0, ds), InputError);
}

TEST(Standardize, TransformAndSelectColumns)
{
    testkit::Gen gen(9);
    const Matrix X = gen.normal_matrix(15, 4);
    const auto ds = StandardizedDataset::standardize(X, gen.normal_vector(15));
    EXPECT_LE((ds.transform(X) - ds.X()).cwiseAbs().maxCoeff(), 1e-14);
    const std::vector<Index> keep{3, 1};
    const auto sub = ds.select_columns(keep);
    EXPECT_EQ(sub.n_vars(), 2);
    EXPECT_EQ(sub.X().col(0), ds.X().col(3));
    EXPECT_EQ(sub.column_norms()(1), ds.column_norms()(1));
}
