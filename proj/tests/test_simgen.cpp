#include "suffpcr/baselines.hpp"
#include "suffpcr/errors.hpp"
#include "suffpcr/rng.hpp"
#include "suffpcr/simgen.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace suffpcr;

namespace {

void expect_dataset_invariants(const GeneratedDataset& data)
{
    const ScenarioSpec& spec = data.spec;
    const Matrix& v = data.loadings;
    EXPECT_LT((v.transpose() * v - Matrix::Identity(spec.d, spec.d)).norm(), 1e-10);
    const std::set<Eigen::Index> support(spec.support.begin(), spec.support.end());
    for (Eigen::Index j = 0; j < spec.p; ++j)
        EXPECT_EQ(v.row(j).isZero(0.0), !support.count(j)) << "row " << j;
    const Vector phi = v * spec.lambdas.cwiseProduct(data.theta);
    EXPECT_LT((phi - data.phi).norm(), 1e-12);
    const Vector l = spec.lambdas.array().square() + data.sigma_x * data.sigma_x;
    const Vector beta = v * spec.lambdas.cwiseProduct(data.theta).cwiseQuotient(l);
    EXPECT_LT((beta - data.beta_star).norm(), 1e-12);
    for (Eigen::Index j : spec.phi_zero)
        EXPECT_LE(std::abs(data.phi[j]), 1e-12) << "phi row " << j;
    EXPECT_EQ(static_cast<Eigen::Index>(data.true_support().size()), spec.s);
}

} // namespace

TEST(Rng, StreamsAreIndependentOfConsumption)
{
    const StreamFactory f(99);
    auto a = f.stream("noise");
    auto b = f.stream("noise");
    for (int i = 0; i < 10; ++i)
        a();
    auto c = f.stream("other");
    EXPECT_NE(b(), c());
    auto b2 = f.stream("noise");
    b2();
    EXPECT_EQ(f.stream("noise")(), StreamFactory(99).stream("noise")());
    EXPECT_NE(f.split(0).master_seed(), f.split(1).master_seed());
}

TEST(BuildLoadings, UnconstrainedSupport)
{
    const ScenarioSpec spec = favorable_screening(50, 2);
    const Matrix v = build_loadings(spec);
    EXPECT_LT((v.transpose() * v - Matrix::Identity(3, 3)).norm(), 1e-10);
    EXPECT_TRUE(v.bottomRows(40).isZero(0.0));
    for (Eigen::Index j = 0; j < 10; ++j)
        EXPECT_GT(v.row(j).norm(), 0.0);
}

TEST(BuildLoadings, PhiZeroRowsHaveRankAtMostTwo)
{
    const ScenarioSpec spec = favorable_suffpcr(100, 3);
    const Matrix v = build_loadings(spec);
    Matrix block(5, 3);
    for (int r = 0; r < 5; ++r)
        block.row(r) = v.row(spec.phi_zero[static_cast<std::size_t>(r)]);
    const Vector sv = Eigen::JacobiSVD<Matrix>(block).singularValues();
    EXPECT_LT(sv[2], 1e-12 * sv[0]);
}

TEST(BuildLoadings, SupportRowsShareLeverageEvenly)
{
    const ScenarioSpec spec = favorable_suffpcr(100, 4);
    const Vector lev = build_loadings(spec).rowwise().squaredNorm();
    for (Eigen::Index j = 0; j < 15; ++j)
        EXPECT_NEAR(lev[j], 3.0 / 15.0, 1e-8);
}

TEST(BuildLoadings, SquareSupportIsOrthogonal)
{
    ScenarioSpec spec = favorable_screening(20, 5);
    spec.s = 3;
    spec.support = {4, 9, 13};
    const Matrix v = build_loadings(spec);
    Matrix block(3, 3);
    block << v.row(4), v.row(9), v.row(13);
    EXPECT_LT((block * block.transpose() - Matrix::Identity(3, 3)).norm(), 1e-10);
}

TEST(CalibrateTheta, Examples)
{
    const ScenarioSpec screening = favorable_screening(60, 6);
    const ThetaCalibration plain = calibrate_theta(build_loadings(screening), screening);
    EXPECT_EQ(plain.theta, screening.theta);

    const ScenarioSpec spec = favorable_suffpcr(60, 6);
    const ThetaCalibration cal = calibrate_theta(build_loadings(spec), spec);
    for (Eigen::Index j : spec.phi_zero)
        EXPECT_LE(std::abs(cal.phi[j]), 1e-12);
    for (Eigen::Index j : spec.support)
        EXPECT_GE(std::abs(cal.beta_star[j]), 1e-8);
    EXPECT_EQ(support_of(cal.beta_star).size(), 15u);
    EXPECT_GT(cal.theta.norm(), 0.0);
}

TEST(Generate, InvariantsOfBothPresets)
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        expect_dataset_invariants(generate(favorable_suffpcr(120, seed)));
        expect_dataset_invariants(generate(favorable_screening(120, seed)));
    }
}

TEST(Generate, SameSeedIsBitwiseIdentical)
{
    const GeneratedDataset a = generate(favorable_suffpcr(80, 17));
    const GeneratedDataset b = generate(favorable_suffpcr(80, 17));
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.y, b.y);
    const GeneratedDataset c = generate(favorable_suffpcr(80, 18));
    EXPECT_NE(a.x, c.x);
}

TEST(Generate, NoiselessLimitIsExactlyLinear)
{
    ScenarioSpec spec = favorable_suffpcr(40, 7);
    spec.sigma_x = 1e-7;
    spec.sigma_y = 1e-7;
    const GeneratedDataset data = generate(spec);
    const FitResult fit = fit_oracle(data.x, data.y, data.true_support());
    EXPECT_LT((data.y - data.x * fit.beta).norm() / data.y.norm(), 1e-5);
    // X_S has rank d here, so compare fitted values rather than coefficients.
    EXPECT_LT((data.x * (fit.beta - data.beta_star)).norm() / data.y.norm(), 1e-5);
}

TEST(Generate, EmpiricalCovarianceMatchesTheModel)
{
    ScenarioSpec spec = favorable_suffpcr(20, 8);
    spec.n = 100000;
    const GeneratedDataset data = generate(spec);
    const Matrix& v = data.loadings;
    const Matrix sigma = v * spec.lambdas.array().square().matrix().asDiagonal() * v.transpose() +
                         data.sigma_x * data.sigma_x * Matrix::Identity(20, 20);
    const Matrix emp = data.x.transpose() * data.x / static_cast<double>(spec.n);
    int within3 = 0;
    int total = 0;
    for (Eigen::Index i = 0; i < 20; ++i) {
        for (Eigen::Index j = i; j < 20; ++j) {
            const double se = std::sqrt((sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / spec.n);
            const double z = std::abs(emp(i, j) - sigma(i, j)) / se;
            within3 += z <= 3.0;
            ++total;
            EXPECT_LT(z, 5.0) << i << "," << j;
        }
    }
    EXPECT_GE(within3, static_cast<int>(0.97 * total));
}

TEST(Generate, BinomialResponseIsBinary)
{
    ScenarioSpec spec = favorable_suffpcr(60, 9);
    spec.family = Family::Binomial;
    const GeneratedDataset data = generate(spec);
    for (Eigen::Index i = 0; i < data.y.size(); ++i)
        EXPECT_TRUE(data.y[i] == 0.0 || data.y[i] == 1.0);
    EXPECT_GT(data.y.sum(), 0.0);
    EXPECT_LT(data.y.sum(), static_cast<double>(data.y.size()));
}

TEST(Validate, RejectsBrokenSpecs)
{
    ScenarioSpec spec = favorable_suffpcr(50, 1);
    spec.sigma_x = spec.lambdas[2] + 1.0;
    EXPECT_THROW(validate(spec), InvalidSpec);

    spec = favorable_suffpcr(50, 1);
    spec.phi_zero.push_back(30);
    EXPECT_THROW(validate(spec), InvalidSpec);

    spec = favorable_suffpcr(50, 1);
    spec.support.pop_back();
    EXPECT_THROW(validate(spec), InvalidSpec);

    spec = favorable_suffpcr(50, 1);
    spec.lambdas << 1.0, 5.0, 3.0;
    EXPECT_THROW(validate(spec), InvalidSpec);
}

TEST(CalibrateTheta, PhiZeroRowsSpanningEverythingIsInfeasible)
{
    ScenarioSpec spec = favorable_suffpcr(50, 1);
    std::mt19937_64 rng(3);
    Matrix v = Matrix::Zero(50, 3);
    v.topRows(15) = testutil::random_orthonormal(rng, 15, 3);
    EXPECT_THROW(calibrate_theta(v, spec), InvalidSpec);
}

TEST(Snr, Formulas)
{
    EXPECT_EQ(snr_x(Vector::Zero(3), 10, 1.0), 0.0);
    Vector l(1);
    l << 3.0;
    EXPECT_NEAR(snr_x(l, 9, 1.0), 1.0, 1e-15);
    EXPECT_NEAR(snr_x(l, 9, 2.0), 0.5, 1e-15);
    EXPECT_NEAR(sigma_x_for_snr(l, 9, 1.0), 1.0, 1e-15);
}

TEST(Snr, TargetsAreHonoured)
{
    ScenarioSpec spec = favorable_suffpcr(200, 4);
    spec.target_snr_x = 0.5;
    spec.target_snr_y = 0.2;
    const SnrPair snr = snr_of(spec);
    EXPECT_NEAR(snr.x, 0.5, 1e-12);
    EXPECT_NEAR(snr.y, 0.2, 1e-12);
}

TEST(SemiSynthetic, Examples)
{
    std::mt19937_64 rng(10);
    const Matrix x_real = testutil::gaussian(rng, 60, 40) +
                          testutil::gaussian(rng, 60, 2) * testutil::gaussian(rng, 2, 40) * 2.0;
    SemiSyntheticParams params;
    params.seed = 3;
    const GeneratedDataset kept20 = semi_synthetic(x_real, params);
    EXPECT_EQ(kept20.true_support().size(), 20u);
    EXPECT_EQ((kept20.loadings.rowwise().squaredNorm().array() > 0.0).count(), 20);
    EXPECT_LT((kept20.loadings.transpose() * kept20.loadings - Matrix::Identity(2, 2)).norm(), 1e-10);

    params.keep_rows = 40;
    const GeneratedDataset dense = semi_synthetic(x_real, params);
    const Matrix centred = x_real.rowwise() - x_real.colwise().mean();
    Eigen::BDCSVD<Matrix> svd(centred, Eigen::ComputeThinV);
    EXPECT_LT(max_principal_angle(dense.loadings, svd.matrixV().leftCols(2)), 1e-6);

    params.keep_rows = 1;
    EXPECT_THROW(semi_synthetic(x_real, params), InvalidInput);
    params.keep_rows = 20;
    EXPECT_THROW(semi_synthetic(Matrix::Ones(10, 5), params), InvalidInput);
}

TEST(Assumptions, Reported)
{
    const GeneratedDataset data = generate(favorable_suffpcr(100, 2));
    const AssumptionReport r = check_assumptions(data, 0.05);
    EXPECT_TRUE(r.a4_spiked);
    EXPECT_TRUE(r.a6_sparsity);
    EXPECT_TRUE(r.proposition1);
    EXPECT_NEAR(r.min_leverage, 0.2, 1e-8);
    ASSERT_TRUE(r.a6_leverage.has_value());
    EXPECT_TRUE(*r.a6_leverage);
    EXPECT_NEAR(r.a5_ratio, 100.0 / ((225.0 + 3.0) * std::log(100.0)), 1e-12);
    EXPECT_FALSE(r.a5_sample_size);
}
