#include "suffpcr/errors.hpp"
#include "suffpcr/lanczos.hpp"
#include "suffpcr/linalg.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace suffpcr;
using testutil::gaussian;
using testutil::random_symmetric;

TEST(SymmetricMatrix, RejectsAsymmetry)
{
    Matrix m = Matrix::Identity(3, 3);
    m(0, 1) = 1e-6;
    EXPECT_THROW(SymmetricMatrix{m}, InvalidInput);
    m(1, 0) = 1e-6;
    EXPECT_NO_THROW(SymmetricMatrix{m});
}

TEST(SymmetricMatrix, RejectsNonFinite)
{
    Matrix m = Matrix::Identity(2, 2);
    m(1, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(SymmetricMatrix{m}, InvalidInput);
}

TEST(EigFull, DiagonalInput)
{
    const EigenPairs e = eig_full(SymmetricMatrix::diagonal(Vector::Map(std::vector<double>{3, 1, 2}.data(), 3)));
    EXPECT_TRUE(e.complete);
    EXPECT_NEAR(e.values[0], 3.0, 1e-14);
    EXPECT_NEAR(e.values[1], 2.0, 1e-14);
    EXPECT_NEAR(e.values[2], 1.0, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(0, 0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(2, 1)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(1, 2)), 1.0, 1e-14);
}

TEST(EigFull, Identity)
{
    const EigenPairs e = eig_full(SymmetricMatrix::identity(4));
    EXPECT_TRUE(e.values.isApprox(Vector::Ones(4), 1e-14));
    EXPECT_LT((e.vectors.transpose() * e.vectors - Matrix::Identity(4, 4)).norm(), 1e-12);
}

TEST(EigFull, ReconstructsRandomMatrices)
{
    std::mt19937_64 rng(11);
    for (Eigen::Index p : {1, 2, 10, 80}) {
        const SymmetricMatrix q = random_symmetric(rng, p);
        const EigenPairs e = eig_full(q);
        ASSERT_EQ(e.count(), p);
        for (Eigen::Index i = 1; i < p; ++i)
            EXPECT_GE(e.values[i - 1], e.values[i]);
        EXPECT_LT((e.vectors.transpose() * e.vectors - Matrix::Identity(p, p)).norm(), 1e-8);
        const Matrix rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
        EXPECT_LE((rebuilt - q.matrix()).norm() / q.frobenius_norm(), 1e-8);
    }
}

TEST(EigTruncated, DiagonalTopTwo)
{
    Vector diag(5);
    diag << 5, 4, 3, 2, 1;
    const EigenPairs e = eig_truncated(SymmetricMatrix::diagonal(diag), 2);
    ASSERT_EQ(e.count(), 2);
    EXPECT_NEAR(e.values[0], 5.0, 1e-10);
    EXPECT_NEAR(e.values[1], 4.0, 1e-10);
}

TEST(EigTruncated, MatchesFullOnRandomMatrices)
{
    std::mt19937_64 rng(12);
    for (Eigen::Index p : {50, 120, 300}) {
        const SymmetricMatrix q = random_symmetric(rng, p);
        const EigenPairs full = eig_full(q);
        for (Eigen::Index k : {1, 5, 12}) {
            TruncatedEigStats stats;
            const EigenPairs e = eig_truncated(q, k, std::nullopt, {}, &stats);
            ASSERT_EQ(e.count(), k);
            for (Eigen::Index i = 0; i < k; ++i) {
                EXPECT_NEAR(e.values[i], full.values[i], 1e-6 * std::abs(full.values[i]) + 1e-12);
                const double residual = (q.matrix() * e.vectors.col(i) - e.values[i] * e.vectors.col(i)).norm();
                EXPECT_LE(residual, 1e-10 * q.frobenius_norm() * 1.0001);
                EXPECT_GE(std::abs(e.vectors.col(i).dot(full.vectors.col(i))), 1 - 1e-6);
            }
            EXPECT_LT((e.vectors.transpose() * e.vectors - Matrix::Identity(k, k)).norm(), 1e-8);
        }
    }
}

TEST(EigTruncated, IndefiniteSpectrumOrderedByValueNotMagnitude)
{
    // The most negative eigenvalue is largest in magnitude; it must not be
    // reported among the top k.
    std::mt19937_64 rng(13);
    const Matrix u = testutil::random_orthonormal(rng, 100, 100);
    Vector values = Vector::LinSpaced(100, 1.0, -0.5);
    values[99] = -50.0;
    const SymmetricMatrix q = SymmetricMatrix::symmetrized(u * values.asDiagonal() * u.transpose());
    const EigenPairs e = eig_truncated(q, 3);
    EXPECT_NEAR(e.values[0], values[0], 1e-8);
    EXPECT_NEAR(e.values[2], values[2], 1e-8);
}

TEST(EigTruncated, FullRankReproducesDense)
{
    std::mt19937_64 rng(14);
    const SymmetricMatrix q = random_symmetric(rng, 90);
    const EigenPairs full = eig_full(q);
    const EigenPairs e = eig_truncated(q, 90);
    EXPECT_TRUE(e.complete);
    EXPECT_LT((e.values - full.values).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(EigTruncated, ClusteredValuesGiveTheInvariantSubspace)
{
    std::mt19937_64 rng(15);
    const Eigen::Index p = 150;
    const Matrix u = testutil::random_orthonormal(rng, p, p);
    Vector values = Vector::LinSpaced(p, 0.5, 0.0);
    values.head(3).setConstant(4.0);
    const SymmetricMatrix q = SymmetricMatrix::symmetrized(u * values.asDiagonal() * u.transpose());
    const EigenPairs e = eig_truncated(q, 3);
    EXPECT_LT(max_principal_angle(e.vectors, u.leftCols(3)), 1e-6);
}

TEST(EigTruncated, ExactWarmStartConvergesQuickly)
{
    std::mt19937_64 rng(16);
    const SymmetricMatrix q = random_symmetric(rng, 200);
    const EigenPairs full = eig_full(q);
    TruncatedEigStats cold;
    TruncatedEigStats warm;
    eig_truncated(q, 1, std::nullopt, {}, &cold);
    const EigenPairs e = eig_truncated(q, 1, Matrix(full.vectors.col(0)), {}, &warm);
    EXPECT_LE(warm.restarts, 2);
    EXPECT_LE(warm.restarts, cold.restarts);
    EXPECT_NEAR(e.values[0], full.values[0], 1e-8);
}

TEST(EigTruncated, SmallMatricesUseDenseSolver)
{
    std::mt19937_64 rng(17);
    const SymmetricMatrix q = random_symmetric(rng, 30);
    TruncatedEigStats stats;
    const EigenPairs e = eig_truncated(q, 4, std::nullopt, {}, &stats);
    EXPECT_TRUE(stats.dense_fallback);
    EXPECT_EQ(e.count(), 4);
}

TEST(EigTruncated, ReportsNonConvergence)
{
    std::mt19937_64 rng(18);
    const SymmetricMatrix q = random_symmetric(rng, 400);
    TruncatedEigOptions options;
    options.max_restarts = 0;
    options.work_extra = 1;
    options.tol = 1e-15;
    try {
        eig_truncated(q, 20, std::nullopt, options);
        FAIL() << "expected ConvergenceFailure";
    } catch (const ConvergenceFailure& e) {
        EXPECT_GT(e.residual(), 0.0);
    }
}

TEST(EigTruncated, RejectsBadK)
{
    const SymmetricMatrix q = SymmetricMatrix::identity(5);
    EXPECT_THROW(eig_truncated(q, 0), InvalidInput);
    EXPECT_THROW(eig_truncated(q, 6), InvalidInput);
}

TEST(Lanczos, FactorizationInvariants)
{
    std::mt19937_64 rng(19);
    const Eigen::Index p = 120;
    const Eigen::Index k = 15;
    const SymmetricMatrix q = random_symmetric(rng, p);
    const ShiftedOperator op(q.matrix(), 20.0);
    LanczosState state = lanczos_init(p, k, gaussian(rng, p, 1).col(0));
    lanczos_extend(op, state, k, rng);
    ASSERT_EQ(state.steps, k);

    const Matrix& pb = state.basis_p;
    const Matrix& zb = state.basis_z;
    const Matrix w = state.bidiagonal.topLeftCorner(k, k);
    EXPECT_LT((pb.transpose() * pb - Matrix::Identity(k, k)).norm(), 1e-8);
    EXPECT_LT((zb.transpose() * zb - Matrix::Identity(k, k)).norm(), 1e-8);
    EXPECT_LT((pb.transpose() * state.residual).norm(), 1e-8);

    const Matrix m = q.matrix() + 20.0 * Matrix::Identity(p, p);
    EXPECT_LT((m * pb - zb * w).norm(), 1e-8 * m.norm());
    Matrix rhs = pb * w.transpose();
    rhs.col(k - 1) += state.residual;
    EXPECT_LT((m.transpose() * zb - rhs).norm(), 1e-8 * m.norm());
}

TEST(PrincipalAngle, Basics)
{
    const Matrix e12 = Matrix::Identity(4, 2);
    Matrix swapped = Matrix::Zero(4, 2);
    swapped(1, 0) = 1.0;
    swapped(0, 1) = -1.0;
    EXPECT_NEAR(max_principal_angle(e12, swapped), 0.0, 1e-7);
    Matrix other = Matrix::Zero(4, 2);
    other(2, 0) = 1.0;
    other(3, 1) = 1.0;
    EXPECT_NEAR(max_principal_angle(e12, other), std::acos(0.0), 1e-12);
}
