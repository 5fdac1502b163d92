#pragma once

#include "suffpcr/linalg.hpp"

#include <vector>

namespace suffpcr {

/// Elbow detection on sorted leverage values. Indices in `cut_index` are
/// 1-based counts (the number of retained rows); `selected` holds 0-based
/// feature indices in ascending order.
struct ThresholdReport
{
    Vector sorted_leverage;    // descending
    Vector weighted_variance;  // T[i], i = 1..p stored at i-1
    Vector first_difference;   // delta[i] = T[i] - T[i-1], NaN at i = 1
    Eigen::Index cut_index = 0;
    double threshold = 0.0;
    std::vector<Eigen::Index> selected;
    /// No index satisfied the elbow condition; every row retained.
    bool no_elbow = false;
};

/// Splits the leverage curve where the jump in the first difference of
/// T[i] = i var(l[1..i]) + (p - i) var(l[i+1..p]) first exceeds the mean
/// absolute first difference seen so far. Throws DegenerateInput for p < 4.
ThresholdReport find_threshold(const Vector& leverage);

/// Zeroes rows of `loadings` whose leverage is below t.
Matrix zero_rows(const Matrix& loadings, const Vector& leverage, double t);

} // namespace suffpcr
