#include "suffpcr/fantope.hpp"

#include "suffpcr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace suffpcr {

namespace {

void check_d(Eigen::Index p, int d)
{
    if (d < 1 || d >= p)
        throw InvalidInput("Fantope dimension d must satisfy 1 <= d < p (d = " + std::to_string(d) +
                           ", p = " + std::to_string(p) + ")");
}

FantopeProjection assemble(const Matrix& vectors, const Vector& values, double tau, Eigen::Index computed)
{
    const Vector clamped = clamp_spectrum(values, tau);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < clamped.size(); ++i)
        if (clamped[i] > 0.0)
            ++rank;

    // Clamped values are non-increasing, so the positive ones lead.
    const Matrix basis = vectors.leftCols(rank);
    const Matrix weighted = basis * clamped.head(rank).asDiagonal();

    FantopeProjection out;
    out.matrix = SymmetricMatrix::symmetrized(weighted * basis.transpose());
    out.water_level = tau;
    out.rank_used = rank;
    out.eigen_pairs_computed = computed;
    out.basis = basis;
    out.clamped = clamped;
    return out;
}

} // namespace

double solve_water_level(std::span<const double> values, int d)
{
    const std::size_t n = values.size();
    if (d < 1 || static_cast<std::size_t>(d) > n)
        throw InvalidInput("solve_water_level: need 1 <= d <= number of values");
    for (double v : values)
        if (!std::isfinite(v))
            throw InvalidInput("solve_water_level: non-finite value");

    // Breakpoints of f(tau) = sum clamp(v_i - tau, 0, 1), visited from large
    // tau to small. Crossing v_i activates term i (slope +1 as tau decreases);
    // crossing v_i - 1 saturates it (slope -1).
    struct Breakpoint
    {
        double at;
        int slope_change;
    };
    std::vector<Breakpoint> points;
    points.reserve(2 * n);
    for (double v : values) {
        points.push_back({v, +1});
        points.push_back({v - 1.0, -1});
    }
    std::sort(points.begin(), points.end(), [](const Breakpoint& a, const Breakpoint& b) {
        if (a.at != b.at)
            return a.at > b.at;
        return a.slope_change > b.slope_change;
    });

    const double target = static_cast<double>(d);
    double f = 0.0;
    int slope = 0;
    double tau = points.front().at;
    for (const Breakpoint& bp : points) {
        const double next_f = f + slope * (tau - bp.at);
        if (slope > 0 && next_f >= target)
            return tau - (target - f) / slope;
        f = next_f;
        tau = bp.at;
        slope += bp.slope_change;
        if (f >= target)
            return tau;
    }
    // Every term saturated: f == n == d on (-inf, min(v) - 1].
    return tau;
}

Vector clamp_spectrum(const Vector& values, double tau)
{
    return (values.array() - tau).max(0.0).min(1.0).matrix();
}

FantopeProjection project_exact(const SymmetricMatrix& q, int d)
{
    check_d(q.dim(), d);
    const EigenPairs eig = eig_full(q);
    const double tau = solve_water_level(std::span<const double>(eig.values.data(), eig.values.size()), d);
    return assemble(eig.vectors, eig.values, tau, eig.count());
}

FantopeProjection project_approx(const SymmetricMatrix& q, int d, const std::optional<Matrix>& warm_start,
                                 const ApproxProjectionOptions& options)
{
    const Eigen::Index p = q.dim();
    check_d(p, d);

    if (p <= options.eig.dense_cutoff)
        return project_exact(q, d);

    const Eigen::Index warm_rank = warm_start ? warm_start->cols() : 0;
    const Eigen::Index buffer = std::max<Eigen::Index>(1, options.buffer);
    const auto limit = static_cast<Eigen::Index>(options.max_fraction * static_cast<double>(p));
    Eigen::Index k = std::max<Eigen::Index>(d, warm_rank) + buffer;
    Eigen::Index total_computed = 0;
    std::optional<Matrix> seed = warm_start;
    TruncatedEigOptions eig_options = options.eig;
    eig_options.max_restarts = std::min(eig_options.max_restarts, options.restart_budget);
    while (k <= limit && k < p) {
        EigenPairs eig;
        try {
            eig = eig_truncated(q, k, seed, eig_options);
        } catch (const ConvergenceFailure&) {
            k *= 2;
            continue;
        }
        total_computed += eig.count();
        const double tau =
            solve_water_level(std::span<const double>(eig.values.data(), eig.values.size()), d);
        if (eig.values[k - 1] <= tau - options.margin) {
            return assemble(eig.vectors, eig.values, tau, total_computed);
        }
        seed = eig.vectors;
        k *= 2;
    }

    FantopeProjection out = project_exact(q, d);
    out.eigen_pairs_computed += total_computed;
    out.exact_fallback = true;
    return out;
}

} // namespace suffpcr
