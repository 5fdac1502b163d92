#pragma once

#include "suffpcr/glm.hpp"
#include "suffpcr/linalg.hpp"
#include "suffpcr/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace suffpcr {

/// Parameters of the row-sparse factor model
///     X = U Lambda V^T + sigma_x E,   Y = U Theta + sigma_y Z.
struct ScenarioSpec
{
    std::string name = "custom";
    Eigen::Index n = 100;
    Eigen::Index p = 300;
    Eigen::Index d = 3;
    Eigen::Index s = 15;
    Vector lambdas;  // descending, positive
    Vector theta;
    double sigma_x = 1.0;
    double sigma_y = 1.0;
    std::vector<Eigen::Index> support;   // |support| == s
    std::vector<Eigen::Index> phi_zero;  // subset of support
    Family family = Family::Gaussian;
    std::uint64_t seed = 0;
    /// When set, sigma_x (resp. sigma_y) is solved from the target ratio.
    std::optional<double> target_snr_x;
    std::optional<double> target_snr_y;
};

/// Throws InvalidSpec when the invariants do not hold.
void validate(const ScenarioSpec& spec);

/// sigma_x after applying target_snr_x, if any.
double resolved_sigma_x(const ScenarioSpec& spec);

struct ThetaCalibration
{
    Vector theta;
    Vector phi;
    Vector beta_star;
};

struct GeneratedDataset
{
    Matrix x;
    Vector y;
    Matrix factors;    // U, n x d
    Matrix loadings;   // population V_d, p x d
    Vector theta;
    Vector beta_star;
    Vector phi;
    Vector lambdas;
    double sigma_x = 1.0;
    double sigma_y = 1.0;
    ScenarioSpec spec;

    std::vector<Eigen::Index> true_support() const { return support_of(beta_star); }
};

/// Row-sparse orthonormal V_d. Rows listed in phi_zero lie in a common
/// (d-1)-dimensional subspace so that a Theta with zero marginal correlation
/// on those rows exists.
Matrix build_loadings(const ScenarioSpec& spec);

/// Theta, Phi = V Lambda Theta and beta* = V L^{-1} Lambda Theta with
/// L = diag(lambda_i^2 + sigma_x^2). With a non-empty phi_zero, Theta is
/// Lambda^{-1} w ||spec.theta|| for a unit w orthogonal to the phi_zero rows.
ThetaCalibration calibrate_theta(const Matrix& loadings, const ScenarioSpec& spec);

GeneratedDataset generate(const ScenarioSpec& spec);

double snr_x(const Vector& lambdas, Eigen::Index p, double sigma_x);
double snr_y(const Matrix& loadings, const Vector& lambdas, const Vector& beta_star, double sigma_x,
             double sigma_y, Eigen::Index n);
double sigma_x_for_snr(const Vector& lambdas, Eigen::Index p, double target);
double sigma_y_for_snr(const Matrix& loadings, const Vector& lambdas, const Vector& beta_star, double sigma_x,
                       Eigen::Index n, double target);

struct SnrPair
{
    double x = 0.0;
    double y = 0.0;
};

SnrPair snr_of(const ScenarioSpec& spec);

struct SemiSyntheticParams
{
    Eigen::Index d = 2;
    Eigen::Index keep_rows = 20;
    Vector theta;          // defaults to ones(d)
    double sigma_x = 0.0;  // non-positive: half the smallest retained lambda
    double sigma_y = 1.0;
    std::optional<double> target_snr_y;
    Eigen::Index n = 0;    // rows to generate; 0 keeps the input row count
    std::uint64_t seed = 0;
};

/// Factor model fitted to a real design: top-d right singular vectors of the
/// centred input, all but the keep_rows largest-leverage rows zeroed,
/// re-orthonormalized, then X and Y regenerated with fresh noise.
GeneratedDataset semi_synthetic(const Matrix& x_real, const SemiSyntheticParams& params);

struct AssumptionReport
{
    bool a4_spiked = false;       // lambda_1 - lambda_d > 0 (or d == 1) and lambda_d > sigma_x
    double a5_ratio = 0.0;        // n / ((s^2 + d) log p)
    bool a5_sample_size = false;  // ratio >= 1
    bool a6_sparsity = false;     // ||diag(V V^T)||_0 <= s
    double min_leverage = 0.0;    // smallest non-zero population leverage
    std::optional<bool> a6_leverage;  // min leverage > 2 tau, when tau is supplied
    bool proposition1 = false;    // zero rows of V imply beta*_j == 0
};

AssumptionReport check_assumptions(const GeneratedDataset& data, std::optional<double> tau = std::nullopt);

/// s = 15 supported features, the last 5 of them with zero marginal
/// correlation, d = 3.
ScenarioSpec favorable_suffpcr(Eigen::Index p = 300, std::uint64_t seed = 1);
/// s = 10 supported features, all with non-zero marginal correlation, d = 3.
ScenarioSpec favorable_screening(Eigen::Index p = 300, std::uint64_t seed = 1);

} // namespace suffpcr
