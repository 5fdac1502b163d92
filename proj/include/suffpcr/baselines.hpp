#pragma once

#include "suffpcr/glm.hpp"
#include "suffpcr/linalg.hpp"

#include <vector>

namespace suffpcr {

enum class BaselineKind
{
    Oracle,
    Ridge,
    Lasso,
    DensePcr,
    ScreenThenPcr
};

/// OLS restricted to `support`; beta is zero elsewhere.
/// Throws InvalidInput when the support is empty or |support| >= n.
FitResult fit_oracle(const Matrix& x, const Vector& y, const std::vector<Eigen::Index>& support);

/// (X^T X + eta I)^{-1} X^T Y.
Vector ridge_primal(const Matrix& x, const Vector& y, double penalty);
/// X^T (X X^T + eta I)^{-1} Y, the same solution through the n x n system.
Vector ridge_dual(const Matrix& x, const Vector& y, double penalty);

/// Ridge over a penalty grid; uses the dual form when p > n. For the binomial
/// family each grid point is a penalized IRLS fit.
std::vector<FitResult> fit_ridge(const Matrix& x, const Vector& y, const std::vector<double>& penalties,
                                 Family family = Family::Gaussian);

/// Log-spaced ridge penalties scaled to the design (n times the top eigenvalue
/// of X^T X / n, spanning six decades).
std::vector<double> ridge_penalty_grid(const Matrix& x, int count);

struct LassoOptions
{
    double tol = 1e-10;
    long max_passes = 100000;
    /// Certify the KKT conditions within this bound at every grid point.
    double kkt_tol = 1e-6;
};

/// Elastic net by cyclic coordinate descent with warm starts along the grid:
///     (1/2n) ||Y - X beta||^2 + lambda (mixing ||beta||_1 + (1 - mixing)/2 ||beta||^2).
/// mixing == 1 is the lasso. The grid must be descending.
std::vector<FitResult> fit_lasso(const Matrix& x, const Vector& y, const std::vector<double>& lambdas,
                                 double mixing = 1.0, const LassoOptions& options = {});

/// Log-spaced grid from the smallest lambda giving beta = 0 down to `ratio`
/// times it.
std::vector<double> lasso_lambda_grid(const Matrix& x, const Vector& y, int count, double mixing = 1.0,
                                      double ratio = 1e-2);

/// Largest KKT violation of an elastic-net solution.
double lasso_kkt_violation(const Matrix& x, const Vector& y, const Vector& beta, double lambda, double mixing);

/// Indices of the k largest |corr(x_j, Y)|, ties to the lower index. Returned
/// in rank order.
std::vector<Eigen::Index> screen_features(const Matrix& x, const Vector& y, Eigen::Index k);

/// PCA on the top-d right singular vectors of X followed by OLS on X V_d.
FitResult fit_dense_pcr(const Matrix& x, const Vector& y, Eigen::Index d);

/// Marginal screening to k features followed by dense PCR on those columns.
FitResult fit_screen_then_pcr(const Matrix& x, const Vector& y, Eigen::Index k, Eigen::Index d);

} // namespace suffpcr
