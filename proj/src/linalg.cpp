#include "suffpcr/linalg.hpp"

#include "suffpcr/errors.hpp"
#include "suffpcr/lanczos.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace suffpcr {

namespace {

bool all_finite(const Matrix& m)
{
    return m.allFinite();
}

// Smallest Gershgorin disc edge; a lower bound on the smallest eigenvalue.
double gershgorin_lower_bound(const Matrix& q)
{
    double lower = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        const double radius = q.col(i).cwiseAbs().sum() - std::abs(q(i, i));
        lower = std::min(lower, q(i, i) - radius);
    }
    return lower;
}

EigenPairs leading(const EigenPairs& full, Eigen::Index k)
{
    EigenPairs out;
    out.values = full.values.head(k);
    out.vectors = full.vectors.leftCols(k);
    out.complete = (k == full.values.size());
    return out;
}

// Rayleigh-Ritz refinement of an orthonormal basis against q. Returns the
// rotated pairs in descending order and the largest residual norm.
EigenPairs rayleigh_ritz(const Matrix& q, const Matrix& basis, double& max_residual)
{
    const Matrix image = q * basis;
    Matrix projected = basis.transpose() * image;
    projected = 0.5 * (projected + projected.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> small(projected);
    const Eigen::Index k = basis.cols();

    EigenPairs out;
    out.values.resize(k);
    out.vectors.resize(basis.rows(), k);
    Matrix rotated_image(basis.rows(), k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::Index src = k - 1 - i;
        out.values[i] = small.eigenvalues()[src];
        out.vectors.col(i) = basis * small.eigenvectors().col(src);
        rotated_image.col(i) = image * small.eigenvectors().col(src);
    }
    max_residual = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        const double res = (rotated_image.col(i) - out.values[i] * out.vectors.col(i)).norm();
        max_residual = std::max(max_residual, res);
    }
    out.complete = (k == basis.rows());
    return out;
}

Vector start_vector(const std::optional<Matrix>& warm_start, Eigen::Index p, std::mt19937_64& rng)
{
    if (warm_start && warm_start->rows() == p && warm_start->cols() > 0 && warm_start->allFinite()) {
        Vector v = warm_start->rowwise().sum();
        if (v.norm() > 0.0)
            return v / v.norm();
    }
    std::normal_distribution<double> normal;
    Vector v(p);
    for (Eigen::Index i = 0; i < p; ++i)
        v[i] = normal(rng);
    return v / v.norm();
}

} // namespace

SymmetricMatrix::SymmetricMatrix(Matrix entries)
{
    if (entries.rows() != entries.cols())
        throw InvalidInput("symmetric matrix must be square, got " + std::to_string(entries.rows()) +
                           "x" + std::to_string(entries.cols()));
    if (entries.rows() < 1)
        throw InvalidInput("symmetric matrix must have dimension >= 1");
    if (!all_finite(entries))
        throw InvalidInput("symmetric matrix has non-finite entries");
    const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
    const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
        throw InvalidInput("matrix is not symmetric (max |a_ij - a_ji| = " + std::to_string(asym) + ")");
    entries_ = std::move(entries);
}

SymmetricMatrix SymmetricMatrix::symmetrized(const Matrix& entries)
{
    if (entries.rows() != entries.cols() || entries.rows() < 1)
        throw InvalidInput("symmetrized: matrix must be square and non-empty");
    return SymmetricMatrix(0.5 * (entries + entries.transpose()), Trusted{});
}

SymmetricMatrix SymmetricMatrix::zero(Eigen::Index dim)
{
    if (dim < 1)
        throw InvalidInput("dimension must be >= 1");
    return SymmetricMatrix(Matrix::Zero(dim, dim), Trusted{});
}

SymmetricMatrix SymmetricMatrix::identity(Eigen::Index dim)
{
    if (dim < 1)
        throw InvalidInput("dimension must be >= 1");
    return SymmetricMatrix(Matrix::Identity(dim, dim), Trusted{});
}

SymmetricMatrix SymmetricMatrix::diagonal(const Vector& diag)
{
    if (diag.size() < 1)
        throw InvalidInput("dimension must be >= 1");
    return SymmetricMatrix(Matrix(diag.asDiagonal()));
}

EigenPairs eig_full(const SymmetricMatrix& q)
{
    if (!all_finite(q.matrix()))
        throw InvalidInput("eig_full: non-finite entries");
    const auto p = static_cast<lapack_int>(q.dim());
    Matrix vectors = q.matrix();
    Vector values(p);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', p, vectors.data(), p, values.data());
    if (info != 0)
        throw InvalidInput("eig_full: LAPACK dsyevd failed with code " + std::to_string(info));

    EigenPairs out;
    out.values = values.reverse();
    out.vectors = vectors.rowwise().reverse();
    out.complete = true;
    return out;
}

EigenPairs eig_truncated(const SymmetricMatrix& q, Eigen::Index k,
                         const std::optional<Matrix>& warm_start,
                         const TruncatedEigOptions& options,
                         TruncatedEigStats* stats)
{
    const Eigen::Index p = q.dim();
    if (k < 1 || k > p)
        throw InvalidInput("eig_truncated: k must lie in [1, p], got " + std::to_string(k));
    if (!(options.tol > 0.0))
        throw InvalidInput("eig_truncated: tolerance must be positive");
    if (!all_finite(q.matrix()))
        throw InvalidInput("eig_truncated: non-finite entries");

    TruncatedEigStats local;
    TruncatedEigStats& st = stats ? *stats : local;
    st = TruncatedEigStats{};

    if (p <= options.dense_cutoff) {
        st.dense_fallback = true;
        return leading(eig_full(q), k);
    }

    const Matrix& qm = q.matrix();
    const double norm_q = qm.norm();
    if (norm_q == 0.0) {
        EigenPairs out;
        out.values = Vector::Zero(k);
        out.vectors = Matrix::Identity(p, k);
        out.complete = (k == p);
        return out;
    }

    const double shift = std::min(std::max(0.0, -gershgorin_lower_bound(qm)), norm_q);
    const ShiftedOperator op(qm, shift);
    const double tol_abs = options.tol * norm_q;

    const Eigen::Index work = std::min<Eigen::Index>(p, k + std::max<Eigen::Index>(options.work_extra, k));
    std::mt19937_64 rng(options.seed);
    LanczosState state = lanczos_init(p, work, start_vector(warm_start, p, rng));

    double achieved = std::numeric_limits<double>::infinity();
    for (int restart = 0;; ++restart) {
        st.matvecs += lanczos_extend(op, state, work, rng);

        const Eigen::Index m = state.steps;
        Eigen::JacobiSVD<Matrix> svd(state.bidiagonal.topLeftCorner(m, m), Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Vector& sigma = svd.singularValues();
        const Matrix& left = svd.matrixU();
        const Matrix& right = svd.matrixV();
        const double rnorm = state.residual.norm();

        // Estimated residuals of the wanted singular triplets.
        double worst = 0.0;
        for (Eigen::Index i = 0; i < k; ++i)
            worst = std::max(worst, rnorm * std::abs(left(m - 1, i)));

        if (worst <= tol_abs || m == p) {
            const Matrix ritz = state.basis_p.leftCols(m) * right.leftCols(k);
            double explicit_res = 0.0;
            EigenPairs out = rayleigh_ritz(qm, orthonormalize_columns(ritz), explicit_res);
            st.matvecs += static_cast<int>(k);
            achieved = explicit_res;
            if (explicit_res <= tol_abs) {
                st.restarts = restart;
                st.max_residual = explicit_res;
                return out;
            }
        } else {
            achieved = worst;
        }

        if (restart >= options.max_restarts) {
            st.restarts = restart;
            st.max_residual = achieved;
            throw ConvergenceFailure("eig_truncated: no convergence after " + std::to_string(restart) +
                                     " restarts (residual " + std::to_string(achieved) + ")",
                                     achieved);
        }

        // Augmented restart: keep the leading Ritz vectors and append the
        // normalized residual direction.
        const Eigen::Index keep = std::min<Eigen::Index>(m - 1, k + std::max<Eigen::Index>(1, (m - k) / 2));
        const Matrix new_p = state.basis_p.leftCols(m) * right.leftCols(keep);
        const Matrix new_z = state.basis_z.leftCols(m) * left.leftCols(keep);
        state.basis_p.leftCols(keep) = new_p;
        state.basis_z.leftCols(keep) = new_z;
        state.bidiagonal.setZero();
        for (Eigen::Index i = 0; i < keep; ++i)
            state.bidiagonal(i, i) = sigma[i];
        state.steps = keep;
    }
}

double max_principal_angle(const Matrix& u, const Matrix& v)
{
    if (u.rows() != v.rows())
        throw InvalidInput("max_principal_angle: row mismatch");
    const Matrix cross = u.transpose() * v;
    Eigen::JacobiSVD<Matrix> svd(cross);
    const Vector& s = svd.singularValues();
    if (s.size() == 0)
        return 0.0;
    const double smallest = std::clamp(s[s.size() - 1], 0.0, 1.0);
    return std::acos(smallest);
}

Matrix orthonormalize_columns(const Matrix& m)
{
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
    // Fix signs so that the diagonal of R is non-negative, keeping columns
    // aligned with the input directions.
    const Matrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < std::min(m.rows(), m.cols()); ++j)
        if (r(j, j) < 0.0)
            q.col(j) = -q.col(j);
    return q;
}

} // namespace suffpcr
