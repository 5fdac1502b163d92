#include "suffpcr/lanczos.hpp"

#include "suffpcr/errors.hpp"

#include <cmath>

namespace suffpcr {

namespace {

constexpr double kBreakdown = 1e-12;

// Two passes of classical Gram-Schmidt against the first `cols` columns.
// Returns the accumulated coefficients.
Vector reorthogonalize(Vector& x, const Matrix& basis, Eigen::Index cols)
{
    Vector coeff = Vector::Zero(cols);
    if (cols == 0)
        return coeff;
    for (int pass = 0; pass < 2; ++pass) {
        const Vector c = basis.leftCols(cols).transpose() * x;
        x.noalias() -= basis.leftCols(cols) * c;
        coeff += c;
    }
    return coeff;
}

Vector random_orthogonal(const Matrix& basis, Eigen::Index cols, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Vector x(basis.rows());
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x[i] = normal(rng);
        reorthogonalize(x, basis, cols);
        const double nrm = x.norm();
        if (nrm > 1e-8)
            return x / nrm;
    }
    throw ConvergenceFailure("lanczos: could not extend an exhausted basis", 0.0);
}

} // namespace

LanczosState lanczos_init(Eigen::Index dim, Eigen::Index work, const Vector& start)
{
    if (work < 1 || work > dim)
        throw InvalidInput("lanczos_init: working size must lie in [1, dim]");
    if (start.size() != dim || !(start.norm() > 0.0))
        throw InvalidInput("lanczos_init: start vector must be a non-zero dim-vector");

    LanczosState state;
    state.basis_p = Matrix::Zero(dim, work);
    state.basis_z = Matrix::Zero(dim, work);
    state.bidiagonal = Matrix::Zero(work, work);
    state.start = start / start.norm();
    state.residual = state.start;
    state.steps = 0;
    return state;
}

int lanczos_extend(const ShiftedOperator& op, LanczosState& state, Eigen::Index target,
                   std::mt19937_64& rng)
{
    const Eigen::Index work = state.basis_p.cols();
    if (target > work)
        throw InvalidInput("lanczos_extend: target exceeds working size");

    int applications = 0;
    double scale = state.bidiagonal.topLeftCorner(state.steps, state.steps).cwiseAbs().maxCoeff();
    if (state.steps == 0)
        scale = 0.0;

    for (Eigen::Index j = state.steps; j < target; ++j) {
        // Next right vector from the pending residual.
        Vector pj = state.residual;
        if (j > 0) {
            reorthogonalize(pj, state.basis_p, j);
            const double rn = pj.norm();
            if (rn <= kBreakdown * std::max(scale, 1e-300))
                pj = random_orthogonal(state.basis_p, j, rng);
            else
                pj /= rn;
        } else {
            pj /= pj.norm();
        }
        state.basis_p.col(j) = pj;

        // Left vector; the Gram-Schmidt coefficients against the earlier left
        // vectors are exactly column j of W above the diagonal.
        Vector z = op.apply(pj);
        ++applications;
        const Vector coupling = reorthogonalize(z, state.basis_z, j);
        state.bidiagonal.col(j).head(j) = coupling;
        double alpha = z.norm();
        scale = std::max(scale, alpha);
        if (alpha <= kBreakdown * std::max(scale, 1e-300)) {
            alpha = 0.0;
            z = random_orthogonal(state.basis_z, j, rng);
        } else {
            z /= alpha;
        }
        state.basis_z.col(j) = z;
        state.bidiagonal(j, j) = alpha;

        // Residual f = M^T z_j - alpha_j p_j, orthogonal to P.
        Vector f = op.apply(z);
        ++applications;
        f -= alpha * pj;
        reorthogonalize(f, state.basis_p, j + 1);
        scale = std::max(scale, f.norm());
        state.residual = f;
        state.steps = j + 1;
    }
    return applications;
}

} // namespace suffpcr
