#include "suffpcr/glm.hpp"

#include "suffpcr/errors.hpp"

#include <cmath>

namespace suffpcr {

namespace {

double log1p_exp(double eta)
{
    return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta)));
}

double sigmoid(double eta)
{
    if (eta >= 0.0)
        return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

std::vector<Eigen::Index> nonzero_rows(const Matrix& loadings)
{
    std::vector<Eigen::Index> rows;
    for (Eigen::Index j = 0; j < loadings.rows(); ++j)
        if (loadings.row(j).squaredNorm() > 0.0)
            rows.push_back(j);
    return rows;
}

void check_design(const Matrix& x, const Vector& y, const Matrix& loadings)
{
    if (x.rows() != y.size())
        throw InvalidInput("design rows (" + std::to_string(x.rows()) + ") differ from response length (" +
                           std::to_string(y.size()) + ")");
    if (loadings.rows() != x.cols())
        throw InvalidInput("loading rows (" + std::to_string(loadings.rows()) + ") differ from feature count (" +
                           std::to_string(x.cols()) + ")");
    if (loadings.cols() < 1 || !(loadings.cwiseAbs().maxCoeff() > 0.0))
        throw EmptyModel("loading matrix is all zero; nothing to regress on");
}

// Penalized binomial log-likelihood, intercept unpenalized.
double objective(const Matrix& design1, const Vector& y, const Vector& coef, double penalty)
{
    const Vector eta = design1 * coef;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        ll += y[i] * eta[i] - log1p_exp(eta[i]);
    return ll - 0.5 * penalty * coef.tail(coef.size() - 1).squaredNorm();
}

} // namespace

std::string to_string(Family family)
{
    return family == Family::Gaussian ? "gaussian" : "binomial";
}

Family family_from_string(const std::string& name)
{
    if (name == "gaussian")
        return Family::Gaussian;
    if (name == "binomial")
        return Family::Binomial;
    throw InvalidInput("unknown family '" + name + "' (expected gaussian or binomial)");
}

std::vector<Eigen::Index> support_of(const Vector& beta, double tol)
{
    std::vector<Eigen::Index> out;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        if (std::abs(beta[j]) > tol)
            out.push_back(j);
    return out;
}

FitResult ols_on_subspace(const Matrix& x, const Vector& y, const Matrix& loadings)
{
    check_design(x, y, loadings);
    const Matrix reduced = x * loadings;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(reduced);

    FitResult fit;
    fit.loadings = loadings;
    fit.gamma = cod.solve(y);
    fit.beta = loadings * fit.gamma;
    fit.selected = nonzero_rows(loadings);
    fit.family = Family::Gaussian;
    fit.intercept = 0.0;
    return fit;
}

Vector logistic_gradient(const Matrix& design1, const Vector& y, const Vector& coef, double jitter)
{
    Vector mu(design1.rows());
    const Vector eta = design1 * coef;
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        mu[i] = sigmoid(eta[i]);
    Vector grad = design1.transpose() * (y - mu);
    grad.tail(grad.size() - 1) -= jitter * coef.tail(coef.size() - 1);
    return grad;
}

std::pair<double, Vector> fit_logistic_irls(const Matrix& design, const Vector& y, double penalty,
                                            const LogisticOptions& options)
{
    const Eigen::Index n = design.rows();
    const Eigen::Index q = design.cols();
    if (y.size() != n)
        throw InvalidInput("logistic: response length differs from design rows");
    double positives = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y[i] != 0.0 && y[i] != 1.0)
            throw InvalidInput("logistic: response must be 0/1");
        positives += y[i];
    }
    if (positives == 0.0 || positives == static_cast<double>(n))
        throw InvalidInput("logistic: both classes must be present");

    Matrix design1(n, q + 1);
    design1.col(0).setOnes();
    design1.rightCols(q) = design;

    Vector coef = Vector::Zero(q + 1);
    coef[0] = std::log(positives / (static_cast<double>(n) - positives));
    double obj = objective(design1, y, coef, penalty);

    Vector penalty_diag = Vector::Constant(q + 1, penalty);
    penalty_diag[0] = 0.0;

    for (int it = 0; it < options.max_iter; ++it) {
        const Vector eta = design1 * coef;
        Vector weights(n);
        Vector mu(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            mu[i] = sigmoid(eta[i]);
            weights[i] = std::max(mu[i] * (1.0 - mu[i]), 1e-12);
        }
        Vector grad = design1.transpose() * (y - mu);
        grad -= penalty_diag.cwiseProduct(coef);

        Matrix hessian = design1.transpose() * weights.asDiagonal() * design1;
        hessian.diagonal() += penalty_diag;
        // Small absolute jitter keeps the system solvable when both the
        // weights and the penalty vanish in some direction.
        hessian.diagonal().array() += options.jitter;
        const Vector step = hessian.ldlt().solve(grad);

        double scale = 1.0;
        Vector candidate = coef + step;
        double cand_obj = objective(design1, y, candidate, penalty);
        while (cand_obj < obj && scale > 1e-10) {
            scale *= 0.5;
            candidate = coef + scale * step;
            cand_obj = objective(design1, y, candidate, penalty);
        }
        if (cand_obj < obj)
            break;
        const double change = cand_obj - obj;
        coef = candidate;
        obj = cand_obj;
        if (change <= options.tol) {
            const Vector g = logistic_gradient(design1, y, coef, penalty);
            if (g.norm() <= 1e-8 * std::max(1.0, static_cast<double>(n)))
                break;
        }
    }
    return {coef[0], coef.tail(q)};
}

FitResult logistic_on_subspace(const Matrix& x, const Vector& y, const Matrix& loadings,
                               const LogisticOptions& options)
{
    check_design(x, y, loadings);
    const Matrix reduced = x * loadings;
    const auto [intercept, gamma] = fit_logistic_irls(reduced, y, options.jitter, options);

    FitResult fit;
    fit.loadings = loadings;
    fit.gamma = gamma;
    fit.beta = loadings * gamma;
    fit.selected = nonzero_rows(loadings);
    fit.family = Family::Binomial;
    fit.intercept = intercept;
    return fit;
}

Vector predict(const FitResult& fit, const Matrix& x_new)
{
    if (x_new.cols() != fit.beta.size())
        throw InvalidInput("predict: expected " + std::to_string(fit.beta.size()) + " columns, got " +
                           std::to_string(x_new.cols()));
    Vector eta = x_new * fit.beta;
    eta.array() += fit.intercept;
    if (fit.family == Family::Binomial)
        eta = eta.unaryExpr([](double v) { return sigmoid(v); });
    return eta;
}

} // namespace suffpcr
