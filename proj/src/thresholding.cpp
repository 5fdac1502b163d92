#include "suffpcr/thresholding.hpp"

#include "suffpcr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace suffpcr {

namespace {

// Sample variance (n - 1 denominator) of a block from its count, sum and sum
// of squares; a single element has variance 0.
double block_variance(Eigen::Index count, double sum, double sum_sq)
{
    if (count < 2)
        return 0.0;
    const double m = static_cast<double>(count);
    return std::max(0.0, (sum_sq - sum * sum / m) / (m - 1.0));
}

} // namespace

ThresholdReport find_threshold(const Vector& leverage)
{
    const Eigen::Index p = leverage.size();
    if (p < 4)
        throw DegenerateInput("find_threshold: need at least 4 leverage values");
    if (!leverage.allFinite())
        throw InvalidInput("find_threshold: non-finite leverage");

    ThresholdReport report;
    report.sorted_leverage = leverage;
    std::sort(report.sorted_leverage.data(), report.sorted_leverage.data() + p, std::greater<double>());
    const Vector& l = report.sorted_leverage;

    // Centering first keeps the running sums well conditioned.
    const double centre = l.mean();
    const Vector x = l.array() - centre;
    const double total = x.sum();
    const double total_sq = x.squaredNorm();

    report.weighted_variance.resize(p);
    double head = 0.0;
    double head_sq = 0.0;
    for (Eigen::Index i = 1; i <= p; ++i) {
        head += x[i - 1];
        head_sq += x[i - 1] * x[i - 1];
        const double var_head = block_variance(i, head, head_sq);
        const double var_tail = block_variance(p - i, total - head, total_sq - head_sq);
        report.weighted_variance[i - 1] = i * var_head + (p - i) * var_tail;
    }

    const Vector& t = report.weighted_variance;
    report.first_difference = Vector::Constant(p, std::numeric_limits<double>::quiet_NaN());
    for (Eigen::Index i = 2; i <= p; ++i)
        report.first_difference[i - 1] = t[i - 1] - t[i - 2];
    const Vector& delta = report.first_difference;

    // Condition at i >= 3: delta[i] - delta[i-1] > mean(|delta[2..i-1]|).
    // The jump lands one past the minimum of T, so the retained block ends at
    // i - 1.
    Eigen::Index fired = 0;
    double abs_sum = 0.0;
    for (Eigen::Index i = 3; i <= p; ++i) {
        abs_sum += std::abs(delta[i - 2]);
        const double mean_abs = abs_sum / static_cast<double>(i - 2);
        if (delta[i - 1] - delta[i - 2] > mean_abs) {
            fired = i;
            break;
        }
    }

    if (fired == 0) {
        report.no_elbow = true;
        report.cut_index = p;
    } else {
        report.cut_index = fired - 1;
    }
    report.threshold = l[report.cut_index - 1];
    for (Eigen::Index j = 0; j < p; ++j)
        if (leverage[j] >= report.threshold)
            report.selected.push_back(j);
    return report;
}

Matrix zero_rows(const Matrix& loadings, const Vector& leverage, double t)
{
    if (leverage.size() != loadings.rows())
        throw InvalidInput("zero_rows: leverage length must match loading rows");
    Matrix out = loadings;
    for (Eigen::Index j = 0; j < out.rows(); ++j)
        if (leverage[j] < t)
            out.row(j).setZero();
    return out;
}

} // namespace suffpcr
