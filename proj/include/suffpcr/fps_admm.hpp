#pragma once

#include "suffpcr/fantope.hpp"
#include "suffpcr/linalg.hpp"

#include <vector>

namespace suffpcr {

enum class ProjectionMode
{
    Exact,
    Approximate
};

/// ADMM settings for
///     max tr(S H) - lambda ||H||_{1,1}   subject to H in F^d.
struct FpsConfig
{
    double lambda = 0.0;
    double rho = 1.0;
    int d = 3;
    int max_iter = 1000;
    /// Non-positive means the default 1e-4 * sqrt(p d).
    double primal_tol = 0.0;
    double dual_tol = 0.0;
    ProjectionMode projection = ProjectionMode::Approximate;
    ApproxProjectionOptions approx{};
};

struct FpsState
{
    SymmetricMatrix A = SymmetricMatrix::zero(1);
    SymmetricMatrix B = SymmetricMatrix::zero(1);
    SymmetricMatrix C = SymmetricMatrix::zero(1);
    int iter = 0;
    std::vector<double> primal_residual;
    std::vector<double> dual_residual;
    bool converged = false;
    /// Eigenvectors of the last projection, reused as a Lanczos warm start.
    Matrix warm_basis;
};

struct SubspaceEstimate
{
    Matrix loadings;                 // p x d, orthonormal columns
    SymmetricMatrix projector = SymmetricMatrix::zero(1); // final B
    Vector leverage;                 // diag(loadings loadings^T)
    Vector eigenvalues;              // top-d eigenvalues of B
};

struct FpsResult
{
    SubspaceEstimate estimate;
    FpsState state;
};

/// Elementwise sign(m) max(|m| - a, 0).
SymmetricMatrix soft_threshold(const SymmetricMatrix& m, double a);

/// Runs the ADMM loop from B = C = 0, or from `warm` (the (B, C) pair of a
/// previous fit, typically the neighbouring lambda on a path). A fit that hits
/// max_iter is returned with state.converged == false.
FpsResult fps_fit(const SymmetricMatrix& s, const FpsConfig& config, const FpsState* warm = nullptr);

/// `count` log-spaced values from max_{i != j} |S_ij| down to 1/100 of it,
/// descending.
std::vector<double> lambda_grid(const SymmetricMatrix& s, int count);

} // namespace suffpcr
