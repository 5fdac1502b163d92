#include "suffpcr/metrics.hpp"

#include "suffpcr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace suffpcr {

SelectionScore score_selection(const std::vector<Eigen::Index>& selected, const std::vector<Eigen::Index>& truth,
                               Eigen::Index p)
{
    const std::set<Eigen::Index> t(truth.begin(), truth.end());
    const std::set<Eigen::Index> s(selected.begin(), selected.end());
    SelectionScore out;
    for (Eigen::Index j : s)
        if (t.count(j))
            ++out.true_positives;
    const double tp = static_cast<double>(out.true_positives);
    const double fp = static_cast<double>(s.size()) - tp;
    const double negatives = static_cast<double>(p) - static_cast<double>(t.size());
    out.precision = s.empty() ? 0.0 : tp / static_cast<double>(s.size());
    out.recall = t.empty() ? 1.0 : tp / static_cast<double>(t.size());
    out.false_positive_rate = negatives > 0.0 ? fp / negatives : 0.0;
    return out;
}

std::vector<RocPoint> normalize_roc(std::vector<RocPoint> points)
{
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

double mean_squared_error(const Vector& truth, const Vector& predicted)
{
    if (truth.size() != predicted.size() || truth.size() == 0)
        throw InvalidInput("mean_squared_error: length mismatch or empty input");
    return (truth - predicted).squaredNorm() / static_cast<double>(truth.size());
}

double classification_accuracy(const Vector& labels, const Vector& probabilities)
{
    if (labels.size() != probabilities.size() || labels.size() == 0)
        throw InvalidInput("classification_accuracy: length mismatch or empty input");
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < labels.size(); ++i)
        if ((probabilities[i] >= 0.5 ? 1.0 : 0.0) == labels[i])
            ++hits;
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double quantile(std::vector<double> values, double q)
{
    if (values.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values)
{
    return quantile(std::move(values), 0.5);
}

} // namespace suffpcr
