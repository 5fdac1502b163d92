#include "suffpcr/errors.hpp"
#include "suffpcr/glm.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace suffpcr;
using testutil::gaussian;
using testutil::random_orthonormal;

namespace {

Matrix centered(const Matrix& x)
{
    return x.rowwise() - x.colwise().mean();
}

Vector bernoulli(std::mt19937_64& rng, const Vector& prob)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector y(prob.size());
    for (Eigen::Index i = 0; i < prob.size(); ++i)
        y[i] = u(rng) < prob[i] ? 1.0 : 0.0;
    return y;
}

} // namespace

TEST(Family, RoundTrip)
{
    EXPECT_EQ(family_from_string(to_string(Family::Gaussian)), Family::Gaussian);
    EXPECT_EQ(family_from_string(to_string(Family::Binomial)), Family::Binomial);
    EXPECT_THROW(family_from_string("poisson"), InvalidInput);
}

TEST(OlsOnSubspace, NoiselessIdentity)
{
    std::mt19937_64 rng(51);
    const Matrix x = centered(gaussian(rng, 30, 6));
    const Matrix e1 = Matrix::Identity(6, 1);
    const FitResult fit = ols_on_subspace(x, x.col(0), e1);
    EXPECT_NEAR(fit.gamma[0], 1.0, 1e-12);
    EXPECT_LT((fit.beta - Vector::Unit(6, 0)).norm(), 1e-12);
    EXPECT_EQ(fit.selected, (std::vector<Eigen::Index>{0}));
}

TEST(OlsOnSubspace, ScaledLoadingsHalveGamma)
{
    std::mt19937_64 rng(52);
    const Matrix x = centered(gaussian(rng, 40, 8));
    const Vector y = centered(gaussian(rng, 40, 1)).col(0);
    const Matrix v = random_orthonormal(rng, 8, 2);
    Matrix scaled = v;
    scaled.col(1) *= 2.0;
    const FitResult a = ols_on_subspace(x, y, v);
    const FitResult b = ols_on_subspace(x, y, scaled);
    EXPECT_NEAR(b.gamma[1], 0.5 * a.gamma[1], 1e-10);
    EXPECT_LT((a.beta - b.beta).norm(), 1e-10);
    EXPECT_LT((a.beta - a.loadings * a.gamma).norm(), 0.0 + 1e-15);
}

TEST(OlsOnSubspace, NoiselessFactorModel)
{
    std::mt19937_64 rng(53);
    const Matrix v = random_orthonormal(rng, 10, 2);
    const Matrix u = gaussian(rng, 50, 2);
    const Matrix x = centered(u * v.transpose() + 0.1 * gaussian(rng, 50, 10));
    Vector coef(2);
    coef << 1.5, -2.0;
    const Vector y = x * v * coef;
    const FitResult fit = ols_on_subspace(x, y, v);
    EXPECT_LE((y - x * fit.beta).norm(), 1e-8);
}

TEST(OlsOnSubspace, NormalEquationsHold)
{
    std::mt19937_64 rng(54);
    const Matrix x = centered(gaussian(rng, 60, 25));
    const Vector y = centered(gaussian(rng, 60, 1)).col(0);
    const Matrix v = random_orthonormal(rng, 25, 4);
    const FitResult fit = ols_on_subspace(x, y, v);
    const Matrix z = x * v;
    EXPECT_LT((z.transpose() * (y - z * fit.gamma)).norm(), 1e-8);
}

TEST(OlsOnSubspace, ProjectionIdentity)
{
    // Regressing on X V and on X V V^T gives the same fitted values.
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 20 + trial;
        const Eigen::Index p = 10 + 2 * trial;
        const Eigen::Index d = 1 + trial % 4;
        const Matrix x = centered(gaussian(rng, n, p));
        const Vector y = centered(gaussian(rng, n, 1)).col(0);
        Matrix v = Matrix::Zero(p, d);
        v.topRows(p / 2) = random_orthonormal(rng, p / 2, d);
        const FitResult reduced = ols_on_subspace(x, y, v);
        const FitResult projected = ols_on_subspace(x, y, v * v.transpose());
        EXPECT_LT((x * reduced.beta - x * projected.beta).norm(), 1e-8) << "trial " << trial;
    }
}

TEST(OlsOnSubspace, RankDeficientUsesMinimumNorm)
{
    std::mt19937_64 rng(56);
    const Matrix x = centered(gaussian(rng, 30, 5));
    const Vector y = centered(gaussian(rng, 30, 1)).col(0);
    Matrix v(5, 2);
    v.col(0) = Vector::Unit(5, 0);
    v.col(1) = Vector::Unit(5, 0);
    const FitResult fit = ols_on_subspace(x, y, v);
    EXPECT_NEAR(fit.gamma[0], fit.gamma[1], 1e-10);
    const double direct = x.col(0).dot(y) / x.col(0).squaredNorm();
    EXPECT_NEAR(fit.beta[0], direct, 1e-10);
}

TEST(OlsOnSubspace, ZeroLoadingsAreRejected)
{
    EXPECT_THROW(ols_on_subspace(Matrix::Ones(5, 3), Vector::Ones(5), Matrix::Zero(3, 2)), EmptyModel);
    EXPECT_THROW(ols_on_subspace(Matrix::Ones(5, 3), Vector::Ones(4), Matrix::Identity(3, 1)), InvalidInput);
}

TEST(LogisticOnSubspace, SeparableDataStaysFinite)
{
    Matrix x(8, 1);
    x << -4, -3, -2, -1, 1, 2, 3, 4;
    Vector y(8);
    y << 0, 0, 0, 0, 1, 1, 1, 1;
    const FitResult fit = logistic_on_subspace(x, y, Matrix::Identity(1, 1));
    EXPECT_TRUE(fit.gamma.allFinite());
    EXPECT_TRUE(std::isfinite(fit.intercept));
    const Vector prob = predict(fit, x);
    for (Eigen::Index i = 0; i < 8; ++i)
        EXPECT_EQ(prob[i] >= 0.5, y[i] == 1.0);
}

TEST(LogisticOnSubspace, NullResponse)
{
    std::mt19937_64 rng(57);
    const Matrix x = centered(gaussian(rng, 400, 5));
    const Vector y = bernoulli(rng, Vector::Constant(400, 0.7));
    const FitResult fit = logistic_on_subspace(x, y, random_orthonormal(rng, 5, 2));
    EXPECT_LT(fit.gamma.cwiseAbs().maxCoeff(), 0.3);
    const Vector prob = predict(fit, x);
    double correct = 0.0;
    for (Eigen::Index i = 0; i < 400; ++i)
        correct += (prob[i] >= 0.5) == (y[i] == 1.0);
    EXPECT_NEAR(correct / 400.0, std::max(y.mean(), 1.0 - y.mean()), 0.05);
}

TEST(LogisticOnSubspace, GradientVanishesAtTheFit)
{
    std::mt19937_64 rng(58);
    const Matrix x = centered(gaussian(rng, 200, 12));
    const Matrix v = random_orthonormal(rng, 12, 3);
    const Vector eta = x * v * Vector::LinSpaced(3, 1.0, -0.5);
    const Vector y = bernoulli(rng, (1.0 / (1.0 + (-eta.array()).exp())).matrix());
    const FitResult fit = logistic_on_subspace(x, y, v);
    Matrix design(200, 4);
    design.col(0).setOnes();
    design.rightCols(3) = x * v;
    Vector coef(4);
    coef << fit.intercept, fit.gamma;
    EXPECT_LE(logistic_gradient(design, y, coef, 1e-8).norm(), 1e-6);
}

TEST(LogisticOnSubspace, RequiresBothClasses)
{
    EXPECT_THROW(logistic_on_subspace(Matrix::Ones(5, 2), Vector::Ones(5), Matrix::Identity(2, 1)), InvalidInput);
    Vector y(4);
    y << 0, 1, 2, 0;
    EXPECT_THROW(logistic_on_subspace(Matrix::Ones(4, 2), y, Matrix::Identity(2, 1)), InvalidInput);
}

TEST(Predict, Examples)
{
    FitResult fit;
    fit.beta = Vector::Zero(3);
    fit.intercept = 2.5;
    std::mt19937_64 rng(59);
    const Matrix x = gaussian(rng, 4, 3);
    EXPECT_TRUE(predict(fit, x).isApprox(Vector::Constant(4, 2.5)));

    fit.beta << 1.0, -2.0, 0.5;
    Matrix row(1, 3);
    row << 0.2, 0.1, 4.0;
    EXPECT_NEAR(predict(fit, row)[0], 0.2 - 0.2 + 2.0 + 2.5, 1e-14);
    EXPECT_THROW(predict(fit, Matrix::Ones(2, 4)), InvalidInput);
}

TEST(Predict, TrainingDataReproducesFittedValues)
{
    std::mt19937_64 rng(60);
    const Matrix x = centered(gaussian(rng, 30, 6));
    const Vector y = centered(gaussian(rng, 30, 1)).col(0);
    const FitResult fit = ols_on_subspace(x, y, random_orthonormal(rng, 6, 2));
    EXPECT_LT((predict(fit, x) - x * fit.loadings * fit.gamma).norm(), 1e-12);
}

TEST(SupportOf, Tolerance)
{
    Vector b(4);
    b << 0, 1e-12, -3, 0;
    EXPECT_EQ(support_of(b), (std::vector<Eigen::Index>{1, 2}));
    EXPECT_EQ(support_of(b, 1e-10), (std::vector<Eigen::Index>{2}));
}
