#pragma once

#include <Eigen/Dense>

#include <optional>

namespace suffpcr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense symmetric p x p matrix. Construction from an arbitrary matrix
/// validates symmetry (relative asymmetry above 1e-12 is rejected) and
/// finiteness; `symmetrized` averages with the transpose instead and is meant
/// for internally generated iterates whose asymmetry is pure rounding.
class SymmetricMatrix
{
public:
    explicit SymmetricMatrix(Matrix entries);

    static SymmetricMatrix symmetrized(const Matrix& entries);
    static SymmetricMatrix zero(Eigen::Index dim);
    static SymmetricMatrix identity(Eigen::Index dim);
    static SymmetricMatrix diagonal(const Vector& diag);

    Eigen::Index dim() const noexcept { return entries_.rows(); }
    const Matrix& matrix() const noexcept { return entries_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

    double frobenius_norm() const { return entries_.norm(); }
    double trace() const { return entries_.trace(); }

private:
    struct Trusted {};
    SymmetricMatrix(Matrix entries, Trusted) : entries_(std::move(entries)) {}

    Matrix entries_;
};

/// Eigenpairs in descending order of eigenvalue. `complete` is set when all p
/// pairs are present.
struct EigenPairs
{
    Vector values;
    Matrix vectors;
    bool complete = false;

    Eigen::Index count() const noexcept { return values.size(); }
};

struct TruncatedEigOptions
{
    /// Residual bound, relative to ||Q||_F: ||Q v - value v|| <= tol ||Q||_F.
    double tol = 1e-10;
    int max_restarts = 300;
    /// Extra Lanczos steps kept beyond k in the working basis.
    int work_extra = 10;
    /// Matrices of dimension at or below this go straight to eig_full.
    Eigen::Index dense_cutoff = 64;
    unsigned long long seed = 0x5eed5eedULL;
};

struct TruncatedEigStats
{
    int restarts = 0;
    int matvecs = 0;
    double max_residual = 0.0;
    bool dense_fallback = false;
};

/// Full symmetric eigendecomposition, values descending.
/// Throws InvalidInput on non-finite entries.
EigenPairs eig_full(const SymmetricMatrix& q);

/// Top-k eigenpairs via augmented restarted Lanczos bidiagonalization.
/// `warm_start` may be a single p-vector or a p x m basis; it only seeds the
/// starting vector. Throws ConvergenceFailure after `max_restarts`.
EigenPairs eig_truncated(const SymmetricMatrix& q, Eigen::Index k,
                         const std::optional<Matrix>& warm_start = std::nullopt,
                         const TruncatedEigOptions& options = {},
                         TruncatedEigStats* stats = nullptr);

/// Largest principal angle (radians) between the column spans of two
/// matrices with orthonormal columns.
double max_principal_angle(const Matrix& u, const Matrix& v);

/// Column-orthonormal basis for the span of `m` (thin Householder QR).
Matrix orthonormalize_columns(const Matrix& m);

} // namespace suffpcr
