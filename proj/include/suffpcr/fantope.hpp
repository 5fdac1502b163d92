#pragma once

#include "suffpcr/linalg.hpp"

#include <optional>
#include <span>

namespace suffpcr {

/// Euclidean projection of a symmetric matrix onto the Fantope
/// F^d = { A symmetric : 0 <= A <= I, tr(A) = d }.
struct FantopeProjection
{
    SymmetricMatrix matrix = SymmetricMatrix::zero(1);
    double water_level = 0.0;
    /// Number of clamped eigenvalues in (0, 1].
    Eigen::Index rank_used = 0;
    Eigen::Index eigen_pairs_computed = 0;
    /// Eigenvectors with positive clamped value; used to warm start the next
    /// approximate projection.
    Matrix basis;
    Vector clamped;
    /// Approximate projection could not certify and used the dense path.
    bool exact_fallback = false;
};

/// tau with sum_i min(max(values_i - tau, 0), 1) == d. `values` must be
/// sorted descending with 1 <= d <= values.size(). Sweeps the 2n breakpoints
/// {v_i, v_i - 1} in sorted order.
double solve_water_level(std::span<const double> values, int d);

/// min(max(values - tau, 0), 1), elementwise.
Vector clamp_spectrum(const Vector& values, double tau);

FantopeProjection project_exact(const SymmetricMatrix& q, int d);

struct ApproxProjectionOptions
{
    /// Eigenpairs computed beyond d on the first attempt.
    Eigen::Index buffer = 10;
    /// The smallest computed eigenvalue must sit this far below tau.
    double margin = 1e-10;
    /// Give up on the truncated path once k would exceed this fraction of p;
    /// past that point a dense decomposition is cheaper.
    double max_fraction = 0.25;
    /// Restarts allowed per truncated solve before k is grown instead.
    int restart_budget = 40;
    TruncatedEigOptions eig{};
};

/// Projection from a truncated eigendecomposition. k starts at d + buffer
/// (or the rank of the warm-start basis plus buffer, if larger) and doubles
/// until the smallest computed eigenvalue is at or below tau - margin, which
/// forces every uncomputed clamped value to zero. A truncated solve that
/// stalls inside an eigenvalue cluster also doubles k. When k outgrows
/// max_fraction * p the exact projection is used and exact_fallback is set.
FantopeProjection project_approx(const SymmetricMatrix& q, int d,
                                 const std::optional<Matrix>& warm_start = std::nullopt,
                                 const ApproxProjectionOptions& options = {});

} // namespace suffpcr
