#pragma once

#include "suffpcr/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace testutil {

using suffpcr::Matrix;
using suffpcr::SymmetricMatrix;
using suffpcr::Vector;

inline Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols)
{
    std::normal_distribution<double> z(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = z(rng);
    return m;
}

inline SymmetricMatrix random_symmetric(std::mt19937_64& rng, Eigen::Index p)
{
    const Matrix g = gaussian(rng, p, p);
    return SymmetricMatrix::symmetrized(0.5 * (g + g.transpose()));
}

inline Matrix random_orthonormal(std::mt19937_64& rng, Eigen::Index p, Eigen::Index k)
{
    Eigen::HouseholderQR<Matrix> qr(gaussian(rng, p, k));
    return qr.householderQ() * Matrix::Identity(p, k);
}

/// Sample covariance of n Gaussian draws with the given spiked spectrum.
inline SymmetricMatrix random_covariance(std::mt19937_64& rng, Eigen::Index p, Eigen::Index n)
{
    const Matrix x = gaussian(rng, n, p) * (Vector::LinSpaced(p, 2.0, 0.5)).asDiagonal();
    return SymmetricMatrix::symmetrized(x.transpose() * x / static_cast<double>(n));
}

/// Reference water level by bisection on the monotone clamped sum.
inline double bisect_water_level(const Vector& values, int d)
{
    auto total = [&](double tau) {
        return (values.array() - tau).max(0.0).min(1.0).sum();
    };
    double lo = values.minCoeff() - 1.0;
    double hi = values.maxCoeff();
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (total(mid) > d ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline Vector sym_eigenvalues_desc(const Matrix& m)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().reverse();
}

/// Orthogonal projector onto the top-d eigenvectors, computed with Eigen's
/// solver so it does not share code with the library.
inline Matrix top_projector(const Matrix& s, Eigen::Index d)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    const Matrix u = es.eigenvectors().rightCols(d);
    return u * u.transpose();
}

} // namespace testutil
