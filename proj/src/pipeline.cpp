#include "suffpcr/pipeline.hpp"

#include "suffpcr/baselines.hpp"
#include "suffpcr/errors.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <tuple>
#include <sstream>

namespace suffpcr {

Standardization learn_standardization(const Matrix& x, const Vector& y)
{
    if (x.rows() < 2)
        throw InvalidInput("standardization needs at least two rows");
    Standardization st;
    const double n = static_cast<double>(x.rows());
    st.means = x.colwise().mean().transpose();
    st.scales.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double var = (x.col(j).array() - st.means[j]).square().sum() / n;
        st.scales[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    st.y_mean = y.size() ? y.mean() : 0.0;
    return st;
}

Matrix apply_standardization(const Standardization& st, const Matrix& x)
{
    if (x.cols() != st.means.size())
        throw InvalidInput("standardization expects " + std::to_string(st.means.size()) + " columns, got " +
                           std::to_string(x.cols()));
    Matrix out = x.rowwise() - st.means.transpose();
    out.array().rowwise() /= st.scales.transpose().array();
    return out;
}

SymmetricMatrix correlation_matrix(const Matrix& standardized)
{
    Matrix s = standardized.transpose() * standardized / static_cast<double>(standardized.rows());
    for (Eigen::Index j = 0; j < s.rows(); ++j)
        if (!(s(j, j) > 0.0))
            s(j, j) = 1.0;
    return SymmetricMatrix::symmetrized(s);
}

Folds split(Eigen::Index n, const std::vector<double>& proportions, std::uint64_t seed, Eigen::Index min_fold)
{
    if (proportions.size() != 3)
        throw InvalidInput("split: expected three proportions");
    double total = 0.0;
    for (double v : proportions) {
        if (!(v > 0.0))
            throw InvalidInput("split: proportions must be positive");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw InvalidInput("split: proportions must sum to 1");

    std::array<Eigen::Index, 3> sizes{};
    Eigen::Index used = 0;
    for (std::size_t f = 0; f < 3; ++f) {
        // Nudge before flooring so 10 * 0.3 counts as 3.
        sizes[f] = static_cast<Eigen::Index>(std::floor(static_cast<double>(n) * proportions[f] + 1e-9));
        used += sizes[f];
    }
    for (std::size_t f = 0; used < n; f = (f + 1) % 3, ++used)
        ++sizes[f];
    for (std::size_t f = 0; f < 3; ++f)
        if (sizes[f] < min_fold)
            throw InvalidInput("split: fold " + std::to_string(f) + " has " + std::to_string(sizes[f]) +
                               " rows, fewer than " + std::to_string(min_fold));

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    Folds folds;
    auto first = order.begin();
    folds.train.assign(first, first + sizes[0]);
    first += sizes[0];
    folds.validation.assign(first, first + sizes[1]);
    first += sizes[1];
    folds.test.assign(first, order.end());
    std::sort(folds.train.begin(), folds.train.end());
    std::sort(folds.validation.begin(), folds.validation.end());
    std::sort(folds.test.begin(), folds.test.end());
    return folds;
}

Matrix take_rows(const Matrix& x, const std::vector<Eigen::Index>& rows)
{
    Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t r = 0; r < rows.size(); ++r)
        out.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
    return out;
}

Vector take_rows(const Vector& y, const std::vector<Eigen::Index>& rows)
{
    Vector out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        out[static_cast<Eigen::Index>(r)] = y[rows[r]];
    return out;
}

ThresholdMode ThresholdMode::parse(const std::string& text)
{
    ThresholdMode mode;
    if (text == "auto")
        return mode;
    if (text == "none") {
        mode.kind = Kind::None;
        return mode;
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(value) || value < 0.0)
        throw InvalidInput("threshold must be 'auto', 'none' or a non-negative number, got '" + text + "'");
    mode.kind = Kind::Fixed;
    mode.value = value;
    return mode;
}

std::string ThresholdMode::to_string() const
{
    switch (kind) {
    case Kind::Auto:
        return "auto";
    case Kind::None:
        return "none";
    case Kind::Fixed:
        break;
    }
    std::ostringstream ss;
    ss.precision(17);
    ss << value;
    return ss.str();
}

SuffPcrFit suffpcr_fit(const Matrix& x, const Vector& y, const SymmetricMatrix& s, const SuffPcrConfig& config,
                       const FpsState* warm)
{
    FpsResult fps = fps_fit(s, config.fps, warm);
    SuffPcrFit out;
    Matrix loadings = fps.estimate.loadings;
    const Vector& leverage = fps.estimate.leverage;

    switch (config.threshold.kind) {
    case ThresholdMode::Kind::Auto:
        if (leverage.size() >= 4) {
            ThresholdReport report = find_threshold(leverage);
            loadings = zero_rows(loadings, leverage, report.threshold);
            out.threshold = std::move(report);
        }
        break;
    case ThresholdMode::Kind::Fixed:
        loadings = zero_rows(loadings, leverage, config.threshold.value);
        break;
    case ThresholdMode::Kind::None:
        break;
    }

    out.fit = config.family == Family::Gaussian ? ols_on_subspace(x, y, loadings)
                                                : logistic_on_subspace(x, y, loadings);
    out.estimate = std::move(fps.estimate);
    out.state = std::move(fps.state);
    return out;
}

std::string to_string(MethodKind kind)
{
    switch (kind) {
    case MethodKind::SuffPcr:
        return "suffpcr";
    case MethodKind::FpsPcr:
        return "fps-pcr";
    case MethodKind::Oracle:
        return "oracle";
    case MethodKind::Ridge:
        return "ridge";
    case MethodKind::Lasso:
        return "lasso";
    case MethodKind::ElasticNet:
        return "elastic-net";
    case MethodKind::DensePcr:
        return "dense-pcr";
    case MethodKind::ScreenThenPcr:
        return "screen-pcr";
    }
    return "unknown";
}

MethodKind method_from_string(const std::string& name)
{
    for (MethodKind k : {MethodKind::SuffPcr, MethodKind::FpsPcr, MethodKind::Oracle, MethodKind::Ridge,
                         MethodKind::Lasso, MethodKind::ElasticNet, MethodKind::DensePcr, MethodKind::ScreenThenPcr})
        if (to_string(k) == name)
            return k;
    throw InvalidInput("unknown method '" + name +
                       "' (expected suffpcr, fps-pcr, oracle, ridge, lasso, elastic-net, dense-pcr or screen-pcr)");
}

namespace {

int grid_count(const MethodSpec& m, int fallback)
{
    return m.lambda_count > 0 ? m.lambda_count : fallback;
}

std::vector<double> descending(std::vector<double> grid)
{
    std::sort(grid.begin(), grid.end(), std::greater<>());
    return grid;
}

Matrix top_right_singular(const Matrix& x, Eigen::Index d)
{
    Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinV);
    return svd.matrixV().leftCols(d);
}

/// Loadings for dense PCR on the columns in `kept` (all columns when empty),
/// embedded back into p rows.
Matrix pcr_loadings(const Matrix& x, const std::vector<Eigen::Index>& kept, Eigen::Index d)
{
    if (kept.empty()) {
        if (d < 1 || d > std::min(x.rows(), x.cols()))
            throw InvalidInput("dense PCR: d must lie in [1, min(n, p)]");
        return top_right_singular(x, d);
    }
    const Matrix sub = take_rows(Matrix(x.transpose()), kept).transpose();
    const Eigen::Index dd = std::min({d, sub.rows(), sub.cols()});
    const Matrix inner = top_right_singular(sub, dd);
    Matrix loadings = Matrix::Zero(x.cols(), dd);
    for (std::size_t c = 0; c < kept.size(); ++c)
        loadings.row(kept[c]) = inner.row(static_cast<Eigen::Index>(c));
    return loadings;
}

Matrix selector(Eigen::Index p, const std::vector<Eigen::Index>& support)
{
    Matrix m = Matrix::Zero(p, static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k)
        m(support[k], static_cast<Eigen::Index>(k)) = 1.0;
    return m;
}

struct CandidateSink
{
    std::vector<Candidate>& out;
    std::vector<TraceEntry>* failures;

    template <class F>
    void attempt(const Hyper& hyper, F&& fn)
    {
        try {
            Candidate c;
            c.hyper = hyper;
            fn(c);
            out.push_back(std::move(c));
        } catch (const Error& e) {
            if (failures) {
                TraceEntry t;
                t.hyper = hyper;
                t.failed = true;
                t.error = e.what();
                failures->push_back(std::move(t));
            }
        }
    }
};

void check_family(const Pipeline& pipeline)
{
    const MethodKind k = pipeline.method.kind;
    if (pipeline.family == Family::Binomial && (k == MethodKind::Lasso || k == MethodKind::ElasticNet))
        throw PipelineError(to_string(k) + " is available for the gaussian family only");
}

} // namespace

std::vector<Candidate> fit_candidates(const Pipeline& pipeline, const Matrix& x, const Vector& y,
                                      std::vector<TraceEntry>* failures)
{
    check_family(pipeline);
    const MethodSpec& m = pipeline.method;
    const Family family = pipeline.family;
    const std::string name = to_string(m.kind);
    const Eigen::Index p = x.cols();

    std::vector<Candidate> out;
    CandidateSink sink{out, failures};

    switch (m.kind) {
    case MethodKind::SuffPcr:
    case MethodKind::FpsPcr: {
        const SymmetricMatrix s = correlation_matrix(x);
        const std::vector<double> grid = m.lambdas.empty() ? lambda_grid(s, grid_count(m, 10)) : descending(m.lambdas);
        SuffPcrConfig config;
        config.family = family;
        config.threshold = m.kind == MethodKind::FpsPcr ? ThresholdMode{ThresholdMode::Kind::None, 0.0} : m.threshold;
        config.fps.rho = m.rho;
        config.fps.max_iter = m.max_iter;
        config.fps.projection = m.projection;
        for (int d : m.d_values) {
            config.fps.d = d;
            std::optional<FpsState> warm;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                config.fps.lambda = grid[i];
                Hyper h;
                h.method = name;
                h.d = d;
                h.lambda = grid[i];
                h.lambda_index = static_cast<int>(i);
                h.threshold = config.threshold.to_string();
                sink.attempt(h, [&](Candidate& c) {
                    SuffPcrFit f = suffpcr_fit(x, y, s, config, warm ? &*warm : nullptr);
                    warm = std::move(f.state);
                    c.fit = std::move(f.fit);
                    c.threshold = std::move(f.threshold);
                    if (c.threshold)
                        c.hyper.threshold_value = c.threshold->threshold;
                    else if (config.threshold.kind == ThresholdMode::Kind::Fixed)
                        c.hyper.threshold_value = config.threshold.value;
                });
            }
        }
        break;
    }
    case MethodKind::Oracle: {
        Hyper h;
        h.method = name;
        h.tuned = false;
        sink.attempt(h, [&](Candidate& c) {
            if (m.oracle_support.empty())
                throw InvalidInput("oracle method needs the true support");
            c.fit = family == Family::Gaussian ? fit_oracle(x, y, m.oracle_support)
                                               : logistic_on_subspace(x, y, selector(p, m.oracle_support));
            c.fit.selected = m.oracle_support;
            std::sort(c.fit.selected.begin(), c.fit.selected.end());
        });
        break;
    }
    case MethodKind::Ridge: {
        const std::vector<double> grid =
            m.lambdas.empty() ? ridge_penalty_grid(x, grid_count(m, m.penalty_count)) : descending(m.lambdas);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            Hyper h;
            h.method = name;
            h.lambda = grid[i];
            h.lambda_index = static_cast<int>(i);
            sink.attempt(h, [&](Candidate& c) { c.fit = std::move(fit_ridge(x, y, {grid[i]}, family).front()); });
        }
        break;
    }
    case MethodKind::Lasso:
    case MethodKind::ElasticNet: {
        const double mixing = m.kind == MethodKind::Lasso ? 1.0 : m.mixing;
        const std::vector<double> grid = m.lambdas.empty()
                                             ? lasso_lambda_grid(x, y, grid_count(m, m.penalty_count), mixing)
                                             : descending(m.lambdas);
        std::vector<FitResult> path;
        Hyper h;
        h.method = name;
        try {
            path = fit_lasso(x, y, grid, mixing);
        } catch (const Error& e) {
            if (failures) {
                TraceEntry t;
                t.hyper = h;
                t.failed = true;
                t.error = e.what();
                failures->push_back(std::move(t));
            }
        }
        for (std::size_t i = 0; i < path.size(); ++i) {
            h.lambda = grid[i];
            h.lambda_index = static_cast<int>(i);
            sink.attempt(h, [&](Candidate& c) { c.fit = std::move(path[i]); });
        }
        break;
    }
    case MethodKind::DensePcr:
        for (int d : m.d_values) {
            Hyper h;
            h.method = name;
            h.d = d;
            sink.attempt(h, [&](Candidate& c) {
                c.fit = family == Family::Gaussian ? fit_dense_pcr(x, y, d)
                                                   : logistic_on_subspace(x, y, pcr_loadings(x, {}, d));
            });
        }
        break;
    case MethodKind::ScreenThenPcr:
        for (std::size_t i = 0; i < m.screen_sizes.size(); ++i) {
            const Eigen::Index k = m.screen_sizes[i];
            for (int d : m.d_values) {
                Hyper h;
                h.method = name;
                h.d = d;
                h.screen_size = k;
                h.lambda_index = static_cast<int>(i);
                sink.attempt(h, [&](Candidate& c) {
                    if (k > p)
                        throw InvalidInput("screen size " + std::to_string(k) + " exceeds p");
                    if (family == Family::Gaussian) {
                        c.fit = fit_screen_then_pcr(x, y, k, d);
                    } else {
                        std::vector<Eigen::Index> kept = screen_features(x, y, k);
                        std::sort(kept.begin(), kept.end());
                        c.fit = logistic_on_subspace(x, y, pcr_loadings(x, kept, d));
                        c.fit.selected = kept;
                    }
                });
            }
        }
        break;
    }
    return out;
}

namespace {

double validation_loss(const FitResult& fit, const Matrix& x, const Vector& y)
{
    const Vector pred = predict(fit, x);
    return fit.family == Family::Gaussian ? mean_squared_error(y, pred) : 1.0 - classification_accuracy(y, pred);
}

bool better(double score, const Candidate& c, double best_score, const Candidate& best)
{
    const double tol = 1e-12 * std::max(1.0, std::abs(best_score));
    if (score < best_score - tol)
        return true;
    if (score > best_score + tol)
        return false;
    if (c.fit.selected.size() != best.fit.selected.size())
        return c.fit.selected.size() < best.fit.selected.size();
    return c.hyper.lambda_index < best.hyper.lambda_index;
}

} // namespace

std::pair<FitResult, EvalReport> tune_and_fit(const Pipeline& pipeline, const Matrix& x, const Vector& y,
                                              const Folds& folds,
                                              const std::optional<std::vector<Eigen::Index>>& true_support)
{
    if (x.rows() != y.size())
        throw InvalidInput("tune_and_fit: X has " + std::to_string(x.rows()) + " rows but Y has " +
                           std::to_string(y.size()));
    const Matrix x_train = take_rows(x, folds.train);
    const Vector y_train = take_rows(y, folds.train);
    const Standardization st = learn_standardization(x_train, y_train);
    const Matrix xs_train = apply_standardization(st, x_train);
    const Matrix xs_val = apply_standardization(st, take_rows(x, folds.validation));
    const Vector y_val = take_rows(y, folds.validation);

    const bool gaussian = pipeline.family == Family::Gaussian;
    const Vector y_fit = gaussian ? Vector(y_train.array() - st.y_mean) : y_train;

    EvalReport report;
    report.method = to_string(pipeline.method.kind);
    report.family = pipeline.family;

    std::vector<TraceEntry> failures;
    std::vector<Candidate> candidates = fit_candidates(pipeline, xs_train, y_fit, &failures);

    std::ptrdiff_t best = -1;
    double best_score = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        Candidate& c = candidates[i];
        if (gaussian)
            c.fit.intercept += st.y_mean;
        c.fit.scaling = st;
        TraceEntry t;
        t.hyper = c.hyper;
        t.n_selected = static_cast<Eigen::Index>(c.fit.selected.size());
        t.validation_score = validation_loss(c.fit, xs_val, y_val);
        if (std::isfinite(t.validation_score) &&
            (best < 0 || better(t.validation_score, c, best_score, candidates[static_cast<std::size_t>(best)]))) {
            best = static_cast<std::ptrdiff_t>(i);
            best_score = t.validation_score;
        }
        report.trace.push_back(std::move(t));
    }
    for (auto& f : failures)
        report.trace.push_back(std::move(f));

    if (best < 0) {
        std::string causes;
        for (const auto& t : report.trace)
            if (t.failed)
                causes += "\n  " + t.hyper.method + " (d=" + std::to_string(t.hyper.d) +
                          ", lambda index=" + std::to_string(t.hyper.lambda_index) + "): " + t.error;
        throw PipelineError("every candidate fit failed for " + report.method + causes);
    }

    Candidate& winner = candidates[static_cast<std::size_t>(best)];
    report.chosen = winner.hyper;
    report.validation_score = best_score;
    report.threshold = winner.threshold;
    report.n_selected = static_cast<Eigen::Index>(winner.fit.selected.size());
    if (!winner.hyper.tuned)
        report.note = "no tuning";

    const Matrix xs_test = apply_standardization(st, take_rows(x, folds.test));
    const Vector y_test = take_rows(y, folds.test);
    const Vector pred = predict(winner.fit, xs_test);
    if (gaussian)
        report.test_mse = mean_squared_error(y_test, pred);
    else
        report.test_accuracy = classification_accuracy(y_test, pred);

    if (true_support) {
        const SelectionScore sc = score_selection(winner.fit.selected, *true_support, x.cols());
        report.precision = sc.precision;
        report.recall = sc.recall;
    }
    return {std::move(winner.fit), std::move(report)};
}

namespace {

/// Replaces automatic grids with the explicit grid computed on standardized
/// data, so every fold sees the same candidates.
Pipeline with_fixed_grid(Pipeline pipeline, const Matrix& xs, const Vector& y_fit)
{
    MethodSpec& m = pipeline.method;
    if (!m.lambdas.empty())
        return pipeline;
    switch (m.kind) {
    case MethodKind::SuffPcr:
    case MethodKind::FpsPcr:
        m.lambdas = lambda_grid(correlation_matrix(xs), grid_count(m, 10));
        break;
    case MethodKind::Ridge:
        m.lambdas = ridge_penalty_grid(xs, grid_count(m, m.penalty_count));
        break;
    case MethodKind::Lasso:
    case MethodKind::ElasticNet:
        m.lambdas = lasso_lambda_grid(xs, y_fit, grid_count(m, m.penalty_count),
                                      m.kind == MethodKind::Lasso ? 1.0 : m.mixing);
        break;
    default:
        break;
    }
    return pipeline;
}

using HyperKey = std::tuple<int, int, Eigen::Index>;

HyperKey key_of(const Hyper& h)
{
    return {h.d, h.lambda_index, h.screen_size};
}

} // namespace

std::pair<FitResult, EvalReport> tune_kfold(const Pipeline& pipeline, const Matrix& x, const Vector& y,
                                            const std::vector<Eigen::Index>& fit_rows,
                                            const std::vector<Eigen::Index>& test_rows, int k, std::uint64_t seed,
                                            const std::optional<std::vector<Eigen::Index>>& true_support)
{
    if (k < 2 || static_cast<std::size_t>(k) > fit_rows.size())
        throw InvalidInput("tune_kfold: k must lie in [2, number of fitting rows]");
    const bool gaussian = pipeline.family == Family::Gaussian;
    const Matrix x_fit = take_rows(x, fit_rows);
    const Vector y_fit = take_rows(y, fit_rows);
    const Standardization pooled = learn_standardization(x_fit, y_fit);
    const Matrix xs_fit = apply_standardization(pooled, x_fit);
    const Vector yc_fit = gaussian ? Vector(y_fit.array() - pooled.y_mean) : y_fit;
    const Pipeline fixed = with_fixed_grid(pipeline, xs_fit, yc_fit);

    std::vector<Eigen::Index> order(fit_rows.size());
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::map<HyperKey, std::pair<Hyper, std::vector<double>>> losses;
    std::vector<TraceEntry> failures;
    for (int f = 0; f < k; ++f) {
        std::vector<Eigen::Index> inner, held;
        for (std::size_t i = 0; i < order.size(); ++i)
            (static_cast<int>(i % static_cast<std::size_t>(k)) == f ? held : inner).push_back(order[i]);
        const Matrix xi = take_rows(x_fit, inner);
        const Vector yi = take_rows(y_fit, inner);
        const Standardization st = learn_standardization(xi, yi);
        const Vector yi_fit = gaussian ? Vector(yi.array() - st.y_mean) : yi;
        const Matrix xs_held = apply_standardization(st, take_rows(x_fit, held));
        const Vector y_held = take_rows(y_fit, held);
        for (Candidate& c : fit_candidates(fixed, apply_standardization(st, xi), yi_fit, &failures)) {
            if (gaussian)
                c.fit.intercept += st.y_mean;
            auto& slot = losses[key_of(c.hyper)];
            slot.first = c.hyper;
            slot.second.push_back(validation_loss(c.fit, xs_held, y_held));
        }
    }

    EvalReport report;
    report.method = to_string(pipeline.method.kind);
    report.family = pipeline.family;
    const Hyper* chosen = nullptr;
    double best_score = 0.0;
    for (const auto& [key, entry] : losses) {
        TraceEntry t;
        t.hyper = entry.first;
        if (entry.second.size() == static_cast<std::size_t>(k))
            t.validation_score =
                std::accumulate(entry.second.begin(), entry.second.end(), 0.0) / static_cast<double>(k);
        else
            t.failed = true, t.error = "failed in at least one fold";
        if (!t.failed && std::isfinite(t.validation_score) &&
            (!chosen || t.validation_score < best_score - 1e-12 * std::max(1.0, std::abs(best_score)))) {
            chosen = &entry.first;
            best_score = t.validation_score;
        }
        report.trace.push_back(std::move(t));
    }
    for (auto& f : failures)
        report.trace.push_back(std::move(f));
    if (!chosen)
        throw PipelineError("every candidate fit failed in cross-validation for " + report.method);

    Pipeline refit = fixed;
    if (chosen->d > 0)
        refit.method.d_values = {chosen->d};
    if (chosen->lambda_index >= 0 && !refit.method.lambdas.empty())
        refit.method.lambdas = {refit.method.lambdas[static_cast<std::size_t>(chosen->lambda_index)]};
    if (chosen->screen_size > 0)
        refit.method.screen_sizes = {chosen->screen_size};

    std::vector<Candidate> final_fit = fit_candidates(refit, xs_fit, yc_fit, nullptr);
    if (final_fit.empty())
        throw PipelineError("refit of the cross-validated choice failed for " + report.method);
    Candidate& winner = final_fit.front();
    if (gaussian)
        winner.fit.intercept += pooled.y_mean;
    winner.fit.scaling = pooled;
    report.chosen = *chosen;
    report.validation_score = best_score;
    report.threshold = winner.threshold;
    report.n_selected = static_cast<Eigen::Index>(winner.fit.selected.size());
    if (!chosen->tuned)
        report.note = "no tuning";

    if (!test_rows.empty()) {
        const Vector pred = predict(winner.fit, apply_standardization(pooled, take_rows(x, test_rows)));
        const Vector y_test = take_rows(y, test_rows);
        if (gaussian)
            report.test_mse = mean_squared_error(y_test, pred);
        else
            report.test_accuracy = classification_accuracy(y_test, pred);
    }
    if (true_support) {
        const SelectionScore sc = score_selection(winner.fit.selected, *true_support, x.cols());
        report.precision = sc.precision;
        report.recall = sc.recall;
    }
    return {std::move(winner.fit), std::move(report)};
}

Vector predict_raw(const FitResult& fit, const Matrix& x_raw)
{
    if (!fit.scaling)
        return predict(fit, x_raw);
    return predict(fit, apply_standardization(*fit.scaling, x_raw));
}

namespace {

/// Every prefix of the features ranked by decreasing score.
void add_nested(std::vector<RocPoint>& points, const Vector& score, const std::vector<Eigen::Index>& truth)
{
    const Eigen::Index p = score.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return score[a] > score[b]; });
    const std::set<Eigen::Index> t(truth.begin(), truth.end());
    const double positives = static_cast<double>(t.size());
    const double negatives = static_cast<double>(p) - positives;
    double tp = 0.0;
    double fp = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) {
        (t.count(order[static_cast<std::size_t>(k)]) ? tp : fp) += 1.0;
        points.emplace_back(negatives > 0.0 ? fp / negatives : 0.0, positives > 0.0 ? tp / positives : 1.0);
    }
}

void add_set(std::vector<RocPoint>& points, const std::vector<Eigen::Index>& selected,
             const std::vector<Eigen::Index>& truth, Eigen::Index p)
{
    const SelectionScore sc = score_selection(selected, truth, p);
    points.emplace_back(sc.false_positive_rate, sc.recall);
}

} // namespace

std::vector<RocPoint> roc_sweep(const Pipeline& pipeline, const Matrix& x, const Vector& y,
                                const std::vector<Eigen::Index>& true_support, int grid_size)
{
    check_family(pipeline);
    const MethodSpec& m = pipeline.method;
    const Standardization st = learn_standardization(x, y);
    const Matrix xs = apply_standardization(st, x);
    const Vector yc = pipeline.family == Family::Gaussian ? Vector(y.array() - st.y_mean) : y;
    const Eigen::Index p = x.cols();
    std::vector<RocPoint> points;

    switch (m.kind) {
    case MethodKind::SuffPcr:
    case MethodKind::FpsPcr: {
        const SymmetricMatrix s = correlation_matrix(xs);
        FpsConfig config;
        config.d = m.d_values.empty() ? 3 : m.d_values.front();
        config.rho = m.rho;
        config.max_iter = m.max_iter;
        config.projection = m.projection;
        std::optional<FpsState> warm;
        for (double lambda : lambda_grid(s, grid_size)) {
            config.lambda = lambda;
            FpsResult r;
            try {
                r = fps_fit(s, config, warm ? &*warm : nullptr);
            } catch (const Error&) {
                continue;
            }
            warm = r.state;
            const Vector& lev = r.estimate.leverage;
            if (m.kind == MethodKind::FpsPcr) {
                std::vector<Eigen::Index> nz;
                for (Eigen::Index j = 0; j < p; ++j)
                    if (lev[j] > 0.0)
                        nz.push_back(j);
                add_set(points, nz, true_support, p);
                continue;
            }
            if (p >= 4)
                add_set(points, find_threshold(lev).selected, true_support, p);
            add_nested(points, lev, true_support);
        }
        break;
    }
    case MethodKind::Oracle:
        add_set(points, m.oracle_support.empty() ? true_support : m.oracle_support, true_support, p);
        break;
    case MethodKind::Ridge:
    case MethodKind::DensePcr: {
        std::vector<Eigen::Index> all(static_cast<std::size_t>(p));
        std::iota(all.begin(), all.end(), Eigen::Index{0});
        add_set(points, all, true_support, p);
        break;
    }
    case MethodKind::Lasso:
    case MethodKind::ElasticNet: {
        const double mixing = m.kind == MethodKind::Lasso ? 1.0 : m.mixing;
        const std::vector<double> grid = lasso_lambda_grid(xs, yc, std::max(grid_size, 2) * 2, mixing, 1e-3);
        for (const FitResult& f : fit_lasso(xs, yc, grid, mixing))
            add_set(points, f.selected, true_support, p);
        break;
    }
    case MethodKind::ScreenThenPcr: {
        Vector score(p);
        const Vector ycc = yc.array() - yc.mean();
        for (Eigen::Index j = 0; j < p; ++j) {
            const double denom = xs.col(j).norm() * ycc.norm();
            score[j] = denom > 0.0 ? std::abs(xs.col(j).dot(ycc)) / denom : 0.0;
        }
        add_nested(points, score, true_support);
        break;
    }
    }
    return normalize_roc(std::move(points));
}

} // namespace suffpcr
