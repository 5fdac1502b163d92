#pragma once

#include "suffpcr/fps_admm.hpp"
#include "suffpcr/glm.hpp"
#include "suffpcr/linalg.hpp"
#include "suffpcr/metrics.hpp"
#include "suffpcr/thresholding.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace suffpcr {

// ---------------------------------------------------------------------------
// Standardization and splitting

/// Column means and scales (population standard deviation) of a training
/// block, applied unchanged to validation and test rows. Constant columns get
/// scale 1.
Standardization learn_standardization(const Matrix& x, const Vector& y);
Matrix apply_standardization(const Standardization& st, const Matrix& x);

/// X^T X / n of a standardized block, with constant columns given a unit
/// diagonal so the matrix stays a valid correlation matrix.
SymmetricMatrix correlation_matrix(const Matrix& standardized);

struct Folds
{
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> validation;
    std::vector<Eigen::Index> test;
};

/// Random disjoint train/validation/test split. Fold sizes are the floors of
/// n * proportion, with the remainder handed out in fold order. Throws
/// InvalidInput when a fold falls below `min_fold`.
Folds split(Eigen::Index n, const std::vector<double>& proportions, std::uint64_t seed, Eigen::Index min_fold = 5);

Matrix take_rows(const Matrix& x, const std::vector<Eigen::Index>& rows);
Vector take_rows(const Vector& y, const std::vector<Eigen::Index>& rows);

// ---------------------------------------------------------------------------
// Sufficient PCR: FPS subspace, row thresholding, regression

struct ThresholdMode
{
    enum class Kind
    {
        Auto,
        Fixed,
        None
    };
    Kind kind = Kind::Auto;
    double value = 0.0;

    static ThresholdMode parse(const std::string& text);
    std::string to_string() const;
};

struct SuffPcrConfig
{
    FpsConfig fps{};
    ThresholdMode threshold{};
    Family family = Family::Gaussian;
};

struct SuffPcrFit
{
    FitResult fit;
    SubspaceEstimate estimate;
    std::optional<ThresholdReport> threshold;
    FpsState state;
};

/// Fits the FPS subspace on `s`, thresholds the loading rows and regresses Y
/// on X times the row-sparse loadings. X must be standardized and, for the
/// gaussian family, Y centred.
SuffPcrFit suffpcr_fit(const Matrix& x, const Vector& y, const SymmetricMatrix& s, const SuffPcrConfig& config,
                       const FpsState* warm = nullptr);

// ---------------------------------------------------------------------------
// Methods and tuning

enum class MethodKind
{
    SuffPcr,
    FpsPcr,
    Oracle,
    Ridge,
    Lasso,
    ElasticNet,
    DensePcr,
    ScreenThenPcr
};

std::string to_string(MethodKind kind);
MethodKind method_from_string(const std::string& name);

struct MethodSpec
{
    MethodKind kind = MethodKind::SuffPcr;
    std::vector<double> lambdas;  // explicit grid; empty means automatic
    int lambda_count = 0;  // 0: 10 for FPS methods, penalty_count otherwise
    std::vector<int> d_values{3};
    ThresholdMode threshold{};
    // Dense eigendecomposition wins at the desk-scale p the harness targets.
    ProjectionMode projection = ProjectionMode::Exact;
    double rho = 1.0;
    int max_iter = 1000;
    double mixing = 0.5;  // elastic net only
    std::vector<Eigen::Index> screen_sizes{5, 10, 15, 20, 30};
    std::vector<Eigen::Index> oracle_support;
    int penalty_count = 30;  // ridge / lasso grids
};

struct Pipeline
{
    MethodSpec method{};
    Family family = Family::Gaussian;
};

struct Hyper
{
    std::string method;
    int d = 0;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    int lambda_index = -1;
    std::string threshold;
    double threshold_value = std::numeric_limits<double>::quiet_NaN();
    Eigen::Index screen_size = 0;
    bool tuned = true;
};

struct TraceEntry
{
    Hyper hyper;
    double validation_score = std::numeric_limits<double>::quiet_NaN();
    Eigen::Index n_selected = 0;
    bool failed = false;
    std::string error;
};

struct EvalReport
{
    std::string method;
    Family family = Family::Gaussian;
    double test_mse = std::numeric_limits<double>::quiet_NaN();
    double test_accuracy = std::numeric_limits<double>::quiet_NaN();
    double validation_score = std::numeric_limits<double>::quiet_NaN();
    Eigen::Index n_selected = 0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::vector<RocPoint> roc;
    Hyper chosen;
    std::vector<TraceEntry> trace;
    std::optional<ThresholdReport> threshold;
    std::string note;
};

struct Candidate
{
    Hyper hyper;
    FitResult fit;
    std::optional<ThresholdReport> threshold;
};

/// Every hyperparameter combination of `method` fitted on standardized
/// training data. Failed combinations are reported through `failures`.
std::vector<Candidate> fit_candidates(const Pipeline& pipeline, const Matrix& x_std, const Vector& y_fit,
                                      std::vector<TraceEntry>* failures = nullptr);

/// Standardizes on the training fold, fits every candidate, picks the best
/// validation score (ties: fewer features, then smaller lambda index) and
/// scores that fit on the test fold. `true_support` adds precision/recall.
std::pair<FitResult, EvalReport> tune_and_fit(const Pipeline& pipeline, const Matrix& x, const Vector& y,
                                              const Folds& folds,
                                              const std::optional<std::vector<Eigen::Index>>& true_support = {});

/// K-fold alternative for real data: grids are fixed on `fit_rows`, each of
/// the k folds is scored by a model fitted on the others, and the
/// hyperparameters with the lowest mean validation loss are refitted on all of
/// `fit_rows` before scoring on `test_rows`.
std::pair<FitResult, EvalReport> tune_kfold(const Pipeline& pipeline, const Matrix& x, const Vector& y,
                                            const std::vector<Eigen::Index>& fit_rows,
                                            const std::vector<Eigen::Index>& test_rows, int k, std::uint64_t seed,
                                            const std::optional<std::vector<Eigen::Index>>& true_support = {});

/// Predictions on the raw scale using the scaling stored in the fit.
Vector predict_raw(const FitResult& fit, const Matrix& x_raw);

/// (FPR, TPR) points traced by varying the method's tuning parameters over a
/// fine grid, against a known support.
std::vector<RocPoint> roc_sweep(const Pipeline& pipeline, const Matrix& x, const Vector& y,
                                const std::vector<Eigen::Index>& true_support, int grid_size = 30);

} // namespace suffpcr
