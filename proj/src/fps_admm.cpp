#include "suffpcr/fps_admm.hpp"

#include "suffpcr/errors.hpp"

#include <cmath>
#include <string>

namespace suffpcr {

SymmetricMatrix soft_threshold(const SymmetricMatrix& m, double a)
{
    if (!(a >= 0.0))
        throw InvalidInput("soft_threshold: threshold must be >= 0");
    const Matrix out = m.matrix().unaryExpr([a](double x) {
        const double mag = std::abs(x) - a;
        return mag > 0.0 ? std::copysign(mag, x) : 0.0;
    });
    return SymmetricMatrix::symmetrized(out);
}

FpsResult fps_fit(const SymmetricMatrix& s, const FpsConfig& config, const FpsState* warm)
{
    const Eigen::Index p = s.dim();
    if (config.d < 1 || config.d >= p)
        throw InvalidInput("fps_fit: need 1 <= d < p");
    if (!(config.rho > 0.0))
        throw InvalidInput("fps_fit: rho must be positive");
    if (!(config.lambda >= 0.0))
        throw InvalidInput("fps_fit: lambda must be >= 0");
    if (config.max_iter < 1)
        throw InvalidInput("fps_fit: max_iter must be >= 1");
    if ((s.matrix().diagonal().array() <= 0.0).any())
        throw InvalidInput("fps_fit: S must have a positive diagonal");

    const double default_tol = 1e-4 * std::sqrt(static_cast<double>(p) * config.d);
    const double primal_tol = config.primal_tol > 0.0 ? config.primal_tol : default_tol;
    const double dual_tol = config.dual_tol > 0.0 ? config.dual_tol : default_tol;
    const double shrink = config.lambda / config.rho;

    FpsState state;
    Matrix b = Matrix::Zero(p, p);
    Matrix c = Matrix::Zero(p, p);
    std::optional<Matrix> warm_basis;
    if (warm != nullptr && warm->B.dim() == p && warm->C.dim() == p) {
        b = warm->B.matrix();
        c = warm->C.matrix();
        if (warm->warm_basis.rows() == p && warm->warm_basis.cols() > 0)
            warm_basis = warm->warm_basis;
    }

    const Matrix s_scaled = s.matrix() / config.rho;
    Matrix a(p, p);
    for (int it = 1; it <= config.max_iter; ++it) {
        const SymmetricMatrix q = SymmetricMatrix::symmetrized(b - c + s_scaled);
        const FantopeProjection proj = config.projection == ProjectionMode::Exact
                                           ? project_exact(q, config.d)
                                           : project_approx(q, config.d, warm_basis, config.approx);
        if (proj.basis.cols() > 0)
            warm_basis = proj.basis;
        a = proj.matrix.matrix();

        const Matrix b_prev = b;
        b = soft_threshold(SymmetricMatrix::symmetrized(a + c), shrink).matrix();
        c += a - b;

        const double primal = (a - b).norm();
        const double dual = config.rho * (b - b_prev).norm();
        state.primal_residual.push_back(primal);
        state.dual_residual.push_back(dual);
        state.iter = it;
        if (primal <= primal_tol && dual <= dual_tol) {
            state.converged = true;
            break;
        }
    }

    state.A = SymmetricMatrix::symmetrized(a);
    state.B = SymmetricMatrix::symmetrized(b);
    state.C = SymmetricMatrix::symmetrized(c);
    if (warm_basis)
        state.warm_basis = *warm_basis;

    TruncatedEigOptions eig_options = config.approx.eig;
    const EigenPairs top = eig_truncated(state.B, config.d, warm_basis, eig_options);

    // A zero row of B forces the matching row of any eigenvector with a
    // non-zero eigenvalue to vanish; snap the round-off to exact zeros.
    Matrix loadings = top.vectors;
    const Matrix& bm = state.B.matrix();
    for (Eigen::Index j = 0; j < bm.rows(); ++j)
        if (bm.row(j).cwiseAbs().maxCoeff() == 0.0)
            loadings.row(j).setZero();

    FpsResult out;
    out.estimate.loadings = std::move(loadings);
    out.estimate.eigenvalues = top.values;
    out.estimate.leverage = out.estimate.loadings.rowwise().squaredNorm();
    out.estimate.projector = state.B;
    out.state = std::move(state);
    return out;
}

std::vector<double> lambda_grid(const SymmetricMatrix& s, int count)
{
    if (count < 1)
        throw InvalidInput("lambda_grid: count must be >= 1");
    const Eigen::Index p = s.dim();
    if (p < 2)
        throw InvalidInput("lambda_grid: need p >= 2 for off-diagonal entries");

    double lambda_max = 0.0;
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < p; ++i)
            if (i != j)
                lambda_max = std::max(lambda_max, std::abs(s(i, j)));

    std::vector<double> grid(static_cast<std::size_t>(count));
    grid[0] = lambda_max;
    if (count == 1)
        return grid;
    const double log_ratio = std::log(100.0);
    for (int i = 1; i < count; ++i)
        grid[static_cast<std::size_t>(i)] = lambda_max * std::exp(-log_ratio * i / (count - 1));
    return grid;
}

} // namespace suffpcr
