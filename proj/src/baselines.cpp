#include "suffpcr/baselines.hpp"

#include "suffpcr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace suffpcr {

namespace {

double soft(double z, double a)
{
    const double mag = std::abs(z) - a;
    return mag > 0.0 ? std::copysign(mag, z) : 0.0;
}

void check_xy(const Matrix& x, const Vector& y)
{
    if (x.rows() != y.size())
        throw InvalidInput("design rows (" + std::to_string(x.rows()) + ") differ from response length (" +
                           std::to_string(y.size()) + ")");
    if (x.rows() < 1 || x.cols() < 1)
        throw InvalidInput("empty design matrix");
}

std::vector<double> log_spaced(double hi, double lo, int count)
{
    std::vector<double> grid(static_cast<std::size_t>(count));
    if (count == 1) {
        grid[0] = hi;
        return grid;
    }
    const double step = std::log(lo / hi) / (count - 1);
    for (int i = 0; i < count; ++i)
        grid[static_cast<std::size_t>(i)] = hi * std::exp(step * i);
    return grid;
}

FitResult linear_fit(Vector beta, Family family, double intercept = 0.0)
{
    FitResult fit;
    fit.selected = support_of(beta);
    fit.beta = std::move(beta);
    fit.family = family;
    fit.intercept = intercept;
    return fit;
}

} // namespace

FitResult fit_oracle(const Matrix& x, const Vector& y, const std::vector<Eigen::Index>& support)
{
    check_xy(x, y);
    if (support.empty())
        throw InvalidInput("fit_oracle: support must be non-empty");
    if (static_cast<Eigen::Index>(support.size()) >= x.rows())
        throw InvalidInput("fit_oracle: support size " + std::to_string(support.size()) +
                           " must be smaller than n = " + std::to_string(x.rows()));
    Matrix sub(x.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) {
        if (support[k] < 0 || support[k] >= x.cols())
            throw InvalidInput("fit_oracle: support index out of range");
        sub.col(static_cast<Eigen::Index>(k)) = x.col(support[k]);
    }
    const Vector coef = Eigen::CompleteOrthogonalDecomposition<Matrix>(sub).solve(y);
    Vector beta = Vector::Zero(x.cols());
    for (std::size_t k = 0; k < support.size(); ++k)
        beta[support[k]] = coef[static_cast<Eigen::Index>(k)];

    FitResult fit;
    fit.beta = std::move(beta);
    fit.selected = support;
    std::sort(fit.selected.begin(), fit.selected.end());
    fit.family = Family::Gaussian;
    return fit;
}

Vector ridge_primal(const Matrix& x, const Vector& y, double penalty)
{
    check_xy(x, y);
    Matrix gram = x.transpose() * x;
    gram.diagonal().array() += penalty;
    return gram.ldlt().solve(x.transpose() * y);
}

Vector ridge_dual(const Matrix& x, const Vector& y, double penalty)
{
    check_xy(x, y);
    Matrix kernel = x * x.transpose();
    kernel.diagonal().array() += penalty;
    return x.transpose() * kernel.ldlt().solve(y);
}

std::vector<FitResult> fit_ridge(const Matrix& x, const Vector& y, const std::vector<double>& penalties,
                                 Family family)
{
    check_xy(x, y);
    for (double eta : penalties)
        if (!(eta > 0.0))
            throw InvalidInput("fit_ridge: penalties must be positive");

    std::vector<FitResult> fits;
    fits.reserve(penalties.size());
    if (family == Family::Binomial) {
        for (double eta : penalties) {
            auto [intercept, beta] = fit_logistic_irls(x, y, eta);
            fits.push_back(linear_fit(std::move(beta), Family::Binomial, intercept));
        }
        return fits;
    }

    const bool dual = x.cols() > x.rows();
    for (double eta : penalties)
        fits.push_back(linear_fit(dual ? ridge_dual(x, y, eta) : ridge_primal(x, y, eta), Family::Gaussian));
    return fits;
}

std::vector<double> ridge_penalty_grid(const Matrix& x, int count)
{
    if (count < 1)
        throw InvalidInput("ridge_penalty_grid: count must be >= 1");
    const Matrix small = x.cols() > x.rows() ? Matrix(x * x.transpose()) : Matrix(x.transpose() * x);
    const double top = Eigen::SelfAdjointEigenSolver<Matrix>(small, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    const double hi = 10.0 * std::max(top, 1e-12);
    return log_spaced(hi, hi * 1e-6, count);
}

double lasso_kkt_violation(const Matrix& x, const Vector& y, const Vector& beta, double lambda, double mixing)
{
    const double n = static_cast<double>(x.rows());
    const Vector grad = x.transpose() * (y - x * beta) / n - lambda * (1.0 - mixing) * beta;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        const double v = beta[j] == 0.0 ? std::max(0.0, std::abs(grad[j]) - lambda * mixing)
                                        : std::abs(grad[j] - lambda * mixing * std::copysign(1.0, beta[j]));
        worst = std::max(worst, v);
    }
    return worst;
}

std::vector<double> lasso_lambda_grid(const Matrix& x, const Vector& y, int count, double mixing, double ratio)
{
    check_xy(x, y);
    if (count < 1)
        throw InvalidInput("lasso_lambda_grid: count must be >= 1");
    if (!(mixing > 0.0 && mixing <= 1.0))
        throw InvalidInput("lasso_lambda_grid: mixing must lie in (0, 1]");
    const double n = static_cast<double>(x.rows());
    const double top = (x.transpose() * y).cwiseAbs().maxCoeff() / (n * mixing);
    return log_spaced(std::max(top, 1e-12), std::max(top, 1e-12) * ratio, count);
}

std::vector<FitResult> fit_lasso(const Matrix& x, const Vector& y, const std::vector<double>& lambdas,
                                 double mixing, const LassoOptions& options)
{
    check_xy(x, y);
    if (!(mixing > 0.0 && mixing <= 1.0))
        throw InvalidInput("fit_lasso: mixing must lie in (0, 1]");
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        if (lambdas[i] > lambdas[i - 1])
            throw InvalidInput("fit_lasso: lambda grid must be descending");

    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    const double nd = static_cast<double>(n);
    const Vector col_scale = x.colwise().squaredNorm().transpose() / nd;
    const double y_scale = std::max(y.squaredNorm() / nd, 1e-300);

    Vector beta = Vector::Zero(p);
    Vector residual = y;
    std::vector<FitResult> fits;
    fits.reserve(lambdas.size());

    auto update = [&](Eigen::Index j, double lambda) {
        if (col_scale[j] == 0.0)
            return 0.0;
        const double old = beta[j];
        const double z = x.col(j).dot(residual) / nd + col_scale[j] * old;
        const double fresh = soft(z, lambda * mixing) / (col_scale[j] + lambda * (1.0 - mixing));
        if (fresh != old) {
            residual.noalias() -= (fresh - old) * x.col(j);
            beta[j] = fresh;
        }
        return col_scale[j] * (fresh - old) * (fresh - old);
    };

    for (double lambda : lambdas) {
        if (!(lambda >= 0.0))
            throw InvalidInput("fit_lasso: lambdas must be >= 0");
        long passes = 0;
        double tol = options.tol;
        while (true) {
            // Full sweep, then iterate on the active set until it settles.
            double worst = 0.0;
            for (Eigen::Index j = 0; j < p; ++j)
                worst = std::max(worst, update(j, lambda));
            ++passes;
            if (worst > tol * y_scale) {
                std::vector<Eigen::Index> active;
                for (Eigen::Index j = 0; j < p; ++j)
                    if (beta[j] != 0.0)
                        active.push_back(j);
                while (passes < options.max_passes) {
                    double inner = 0.0;
                    for (Eigen::Index j : active)
                        inner = std::max(inner, update(j, lambda));
                    ++passes;
                    if (inner <= tol * y_scale)
                        break;
                }
                if (passes < options.max_passes)
                    continue;
            }
            // Recompute the residual to shed drift before certifying.
            residual = y - x * beta;
            const double kkt = lasso_kkt_violation(x, y, beta, lambda, mixing);
            if (kkt <= options.kkt_tol)
                break;
            if (passes >= options.max_passes)
                throw ConvergenceFailure("fit_lasso: no convergence after " + std::to_string(passes) +
                                             " passes (KKT violation " + std::to_string(kkt) + ")",
                                         kkt);
            tol *= 1e-2;
        }
        fits.push_back(linear_fit(beta, Family::Gaussian));
    }
    return fits;
}

std::vector<Eigen::Index> screen_features(const Matrix& x, const Vector& y, Eigen::Index k)
{
    check_xy(x, y);
    const Eigen::Index p = x.cols();
    if (k < 1 || k > p)
        throw InvalidInput("screen_features: k must lie in [1, p]");

    const Vector yc = y.array() - y.mean();
    const double y_norm = yc.norm();
    Vector score(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const Vector xc = x.col(j).array() - x.col(j).mean();
        const double denom = xc.norm() * y_norm;
        score[j] = denom > 0.0 ? std::abs(xc.dot(yc)) / denom : 0.0;
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return score[a] > score[b]; });
    order.resize(static_cast<std::size_t>(k));
    return order;
}

FitResult fit_dense_pcr(const Matrix& x, const Vector& y, Eigen::Index d)
{
    check_xy(x, y);
    if (d < 1 || d > std::min(x.rows(), x.cols()))
        throw InvalidInput("fit_dense_pcr: d must lie in [1, min(n, p)]");
    Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinV);
    const Matrix loadings = svd.matrixV().leftCols(d);
    return ols_on_subspace(x, y, loadings);
}

FitResult fit_screen_then_pcr(const Matrix& x, const Vector& y, Eigen::Index k, Eigen::Index d)
{
    std::vector<Eigen::Index> kept = screen_features(x, y, k);
    std::sort(kept.begin(), kept.end());
    Matrix sub(x.rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c)
        sub.col(static_cast<Eigen::Index>(c)) = x.col(kept[c]);

    const Eigen::Index dd = std::min({d, sub.rows(), sub.cols()});
    const FitResult inner = fit_dense_pcr(sub, y, dd);

    FitResult fit;
    fit.loadings = Matrix::Zero(x.cols(), dd);
    fit.beta = Vector::Zero(x.cols());
    for (std::size_t c = 0; c < kept.size(); ++c) {
        fit.loadings.row(kept[c]) = inner.loadings.row(static_cast<Eigen::Index>(c));
        fit.beta[kept[c]] = inner.beta[static_cast<Eigen::Index>(c)];
    }
    fit.gamma = inner.gamma;
    fit.selected = kept;
    fit.family = Family::Gaussian;
    return fit;
}

} // namespace suffpcr
