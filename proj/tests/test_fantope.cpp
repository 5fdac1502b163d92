#include "suffpcr/errors.hpp"
#include "suffpcr/fantope.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace suffpcr;
using testutil::random_orthonormal;
using testutil::random_symmetric;

namespace {

std::span<const double> span(const Vector& v)
{
    return {v.data(), static_cast<std::size_t>(v.size())};
}

Vector vec(std::initializer_list<double> xs)
{
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs)
        v[i++] = x;
    return v;
}

void expect_in_fantope(const SymmetricMatrix& a, int d)
{
    EXPECT_NEAR(a.trace(), d, 1e-8);
    const Vector ev = testutil::sym_eigenvalues_desc(a.matrix());
    EXPECT_GE(ev.minCoeff(), -1e-8);
    EXPECT_LE(ev.maxCoeff(), 1 + 1e-8);
}

} // namespace

TEST(WaterLevel, AlreadyFeasible)
{
    const Vector v = vec({1, 0, 0});
    const double tau = solve_water_level(span(v), 1);
    EXPECT_TRUE(clamp_spectrum(v, tau).isApprox(vec({1, 0, 0}), 1e-12));
}

TEST(WaterLevel, SmallExamples)
{
    const Vector v = vec({3, 2, 1});
    EXPECT_TRUE(clamp_spectrum(v, solve_water_level(span(v), 1)).isApprox(vec({1, 0, 0})));
    EXPECT_TRUE(clamp_spectrum(v, solve_water_level(span(v), 2)).isApprox(vec({1, 1, 0})));
    // Bisection finds tau = 2 for d = 1: (3 - 2) clamps to 1, the rest to 0.
    EXPECT_NEAR(testutil::bisect_water_level(v, 1), 2.0, 1e-10);
}

TEST(WaterLevel, AgreesWithBisectionOnRandomSpectra)
{
    std::mt19937_64 rng(21);
    std::normal_distribution<double> z(0.0, 2.0);
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Index p = 2 + trial % 40;
        Vector v(p);
        for (Eigen::Index i = 0; i < p; ++i)
            v[i] = trial % 3 == 0 ? std::round(z(rng)) : z(rng);  // ties on some trials
        std::sort(v.data(), v.data() + p, std::greater<double>());
        const int d = 1 + trial % static_cast<int>(std::min<Eigen::Index>(p - 1, 5));
        const double tau = solve_water_level(span(v), d);
        const Vector clamped = clamp_spectrum(v, tau);
        EXPECT_NEAR(clamped.sum(), d, 1e-10);
        const Vector reference = clamp_spectrum(v, testutil::bisect_water_level(v, d));
        EXPECT_LT((clamped - reference).cwiseAbs().maxCoeff(), 1e-10) << "trial " << trial;
    }
}

TEST(ProjectExact, FixedPoint)
{
    const SymmetricMatrix q = SymmetricMatrix::diagonal(vec({1, 0, 0}));
    const FantopeProjection proj = project_exact(q, 1);
    EXPECT_LT((proj.matrix.matrix() - q.matrix()).norm(), 1e-12);
}

TEST(ProjectExact, DiagonalExample)
{
    const FantopeProjection proj = project_exact(SymmetricMatrix::diagonal(vec({3, 2, 1})), 2);
    EXPECT_LT((proj.matrix.matrix() - vec({1, 1, 0}).asDiagonal().toDenseMatrix()).norm(), 1e-12);
    EXPECT_EQ(proj.rank_used, 2);
}

TEST(ProjectExact, NearestPointAgainstRandomFeasiblePoints)
{
    std::mt19937_64 rng(22);
    const SymmetricMatrix q = random_symmetric(rng, 20);
    const FantopeProjection proj = project_exact(q, 3);
    expect_in_fantope(proj.matrix, 3);
    const double best = (proj.matrix.matrix() - q.matrix()).norm();
    for (int i = 0; i < 200; ++i) {
        const Matrix m = random_orthonormal(rng, 20, 3);
        EXPECT_LE(best, (m * m.transpose() - q.matrix()).norm());
    }
}

TEST(ProjectExact, IndefiniteInputAndIdempotence)
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index p = 5 + 7 * trial;
        const int d = 1 + trial % 4;
        const SymmetricMatrix q = SymmetricMatrix::symmetrized(random_symmetric(rng, p).matrix() * 5.0 - 3.0 * Matrix::Identity(p, p));
        const FantopeProjection once = project_exact(q, d);
        expect_in_fantope(once.matrix, d);
        const FantopeProjection twice = project_exact(once.matrix, d);
        EXPECT_LT((twice.matrix.matrix() - once.matrix.matrix()).norm(), 1e-8);
    }
}

TEST(ProjectExact, RejectsBadD)
{
    const SymmetricMatrix q = SymmetricMatrix::identity(3);
    EXPECT_THROW(project_exact(q, 0), InvalidInput);
    EXPECT_THROW(project_exact(q, 3), InvalidInput);
}

TEST(ProjectApprox, SmallDiagonal)
{
    const Vector diag = vec({5, 4, 3, 2, 1, 0.5, 0.4, 0.3, 0.2, 0.1});
    const SymmetricMatrix q = SymmetricMatrix::diagonal(diag);
    const FantopeProjection exact = project_exact(q, 1);
    const FantopeProjection approx = project_approx(q, 1);
    EXPECT_LT((exact.matrix.matrix() - approx.matrix.matrix()).norm(), 1e-8);
}

TEST(ProjectApprox, LowRankPlusNoise)
{
    std::mt19937_64 rng(24);
    for (Eigen::Index p : {100, 250}) {
        const Matrix u = random_orthonormal(rng, p, 3);
        const SymmetricMatrix q = SymmetricMatrix::symmetrized(
            u * vec({6, 5, 4}).asDiagonal() * u.transpose() + 0.05 * random_symmetric(rng, p).matrix());
        const FantopeProjection exact = project_exact(q, 3);
        const FantopeProjection approx = project_approx(q, 3);
        EXPECT_LT((exact.matrix.matrix() - approx.matrix.matrix()).norm(), 1e-6);
        EXPECT_FALSE(approx.exact_fallback);
        expect_in_fantope(approx.matrix, 3);
        EXPECT_NEAR(approx.water_level, exact.water_level, 1e-8);
    }
}

TEST(ProjectApprox, RankThreeDominantNeedsOneAttempt)
{
    std::mt19937_64 rng(25);
    const Eigen::Index p = 200;
    const Matrix u = random_orthonormal(rng, p, p);
    Vector values = Vector::LinSpaced(p, 0.3, 0.0);
    values.head(3) = vec({9, 8, 7});
    const SymmetricMatrix q = SymmetricMatrix::symmetrized(u * values.asDiagonal() * u.transpose());
    const FantopeProjection approx = project_approx(q, 3);
    EXPECT_LE(approx.eigen_pairs_computed, 3 + ApproxProjectionOptions{}.buffer);
    EXPECT_LT((approx.matrix.matrix() - project_exact(q, 3).matrix.matrix()).norm(), 1e-8);
}

TEST(ProjectApprox, GrowsKForFlatSpectra)
{
    // Flat top spectrum: tau sits well inside the computed block, so k must
    // grow before certification succeeds.
    std::mt19937_64 rng(26);
    const Eigen::Index p = 300;
    const Matrix u = random_orthonormal(rng, p, p);
    Vector values = Vector::LinSpaced(p, 2.0, -1.0);
    const SymmetricMatrix q = SymmetricMatrix::symmetrized(u * values.asDiagonal() * u.transpose());
    const FantopeProjection exact = project_exact(q, 5);
    const FantopeProjection approx = project_approx(q, 5);
    EXPECT_GT(approx.eigen_pairs_computed, 5 + ApproxProjectionOptions{}.buffer);
    EXPECT_LT((approx.matrix.matrix() - exact.matrix.matrix()).norm(), 1e-6);
}

TEST(ProjectApprox, FallsBackToExactWhenGrowthIsExhausted)
{
    std::mt19937_64 rng(27);
    const Eigen::Index p = 120;
    const SymmetricMatrix q = SymmetricMatrix::symmetrized(0.01 * random_symmetric(rng, p).matrix());
    ApproxProjectionOptions options;
    options.max_fraction = 0.1;
    const FantopeProjection approx = project_approx(q, 20, std::nullopt, options);
    EXPECT_TRUE(approx.exact_fallback);
    EXPECT_LT((approx.matrix.matrix() - project_exact(q, 20).matrix.matrix()).norm(), 1e-10);
}

TEST(ProjectApprox, WarmStartKeepsTheContract)
{
    std::mt19937_64 rng(28);
    const Eigen::Index p = 150;
    const Matrix u = random_orthonormal(rng, p, 3);
    const SymmetricMatrix q = SymmetricMatrix::symmetrized(
        u * vec({3, 2.5, 2}).asDiagonal() * u.transpose() + 0.1 * random_symmetric(rng, p).matrix());
    const FantopeProjection cold = project_approx(q, 3);
    const FantopeProjection warm = project_approx(q, 3, cold.basis);
    EXPECT_LT((cold.matrix.matrix() - warm.matrix.matrix()).norm(), 1e-8);
}
