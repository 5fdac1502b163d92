#pragma once

#include "suffpcr/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace suffpcr {

enum class Family
{
    Gaussian,
    Binomial
};

std::string to_string(Family family);
Family family_from_string(const std::string& name);

/// Column centering/scaling learned on a training set, plus the response
/// centre. Stored with a fit so that raw data can be scored later.
struct Standardization
{
    Vector means;
    Vector scales;
    double y_mean = 0.0;
};

struct FitResult
{
    Matrix loadings;  // p x d; empty for baselines that do not use a subspace
    Vector gamma;
    Vector beta;      // p-vector on the standardized scale
    std::vector<Eigen::Index> selected;
    Family family = Family::Gaussian;
    double intercept = 0.0;
    std::optional<Standardization> scaling;

    Eigen::Index num_features() const noexcept { return beta.size(); }
};

/// Indices with non-zero entries, ascending.
std::vector<Eigen::Index> support_of(const Vector& beta, double tol = 0.0);

/// Least squares of Y on X * loadings (minimum-norm when the reduced design is
/// rank deficient). Expects centred X and Y; the intercept is 0.
FitResult ols_on_subspace(const Matrix& x, const Vector& y, const Matrix& loadings);

struct LogisticOptions
{
    double jitter = 1e-8;
    double tol = 1e-10;
    int max_iter = 100;
};

/// Logistic regression of binary Y on [1, X * loadings] by iteratively
/// reweighted least squares, with a 1e-8 ridge jitter on the slope terms so
/// that separable data still yields a finite fit.
FitResult logistic_on_subspace(const Matrix& x, const Vector& y, const Matrix& loadings,
                               const LogisticOptions& options = {});

/// Gaussian: X beta + intercept. Binomial: logistic link probabilities.
Vector predict(const FitResult& fit, const Matrix& x_new);

/// Gradient of the jittered log-likelihood at the fitted coefficients; used
/// to certify IRLS solutions.
Vector logistic_gradient(const Matrix& reduced_with_intercept, const Vector& y, const Vector& coef,
                         double jitter);

/// Penalized IRLS on an arbitrary design (an intercept column is added
/// internally and never penalized). Returns (intercept, coefficients).
std::pair<double, Vector> fit_logistic_irls(const Matrix& design, const Vector& y, double penalty,
                                            const LogisticOptions& options = {});

} // namespace suffpcr
