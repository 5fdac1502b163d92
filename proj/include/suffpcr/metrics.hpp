#pragma once

#include "suffpcr/linalg.hpp"

#include <utility>
#include <vector>

namespace suffpcr {

struct SelectionScore
{
    double precision = 0.0;
    double recall = 0.0;
    double false_positive_rate = 0.0;
    Eigen::Index true_positives = 0;
};

/// Scores a selected index set against the true support among p features.
/// An empty selection has precision 0.
SelectionScore score_selection(const std::vector<Eigen::Index>& selected, const std::vector<Eigen::Index>& truth,
                               Eigen::Index p);

using RocPoint = std::pair<double, double>;  // (FPR, TPR)

/// Sorted by FPR then TPR, duplicates removed.
std::vector<RocPoint> normalize_roc(std::vector<RocPoint> points);

double mean_squared_error(const Vector& truth, const Vector& predicted);
/// Fraction of rows where (probability >= 0.5) matches the 0/1 label.
double classification_accuracy(const Vector& labels, const Vector& probabilities);

double median(std::vector<double> values);
/// Linear-interpolated quantile, q in [0, 1].
double quantile(std::vector<double> values, double q);

} // namespace suffpcr
