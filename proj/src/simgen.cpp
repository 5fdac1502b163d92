#include "suffpcr/simgen.hpp"

#include "suffpcr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace suffpcr {

namespace {

constexpr int kThetaAttempts = 32;

double sigmoid(double eta)
{
    return eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
}

Vector population_l(const Vector& lambdas, double sigma_x)
{
    return (lambdas.array().square() + sigma_x * sigma_x).matrix();
}

// Right singular vectors of the rows of `loadings` listed in `rows` whose
// singular values vanish: the directions w with V_rows w == 0.
Matrix null_directions(const Matrix& loadings, const std::vector<Eigen::Index>& rows)
{
    const Eigen::Index d = loadings.cols();
    Matrix block(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i)
        block.row(static_cast<Eigen::Index>(i)) = loadings.row(rows[i]);
    Eigen::JacobiSVD<Matrix> svd(block, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double cutoff = 1e-10 * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > cutoff)
            ++rank;
    return svd.matrixV().rightCols(d - rank);
}

Vector beta_from(const Matrix& loadings, const Vector& lambdas, const Vector& theta, double sigma_x)
{
    const Vector l = population_l(lambdas, sigma_x);
    return loadings * (lambdas.cwiseProduct(theta).cwiseQuotient(l));
}

struct FactorDraw
{
    Matrix x;
    Vector y;
    Matrix factors;
};

FactorDraw draw_factor_model(const Matrix& loadings, const Vector& lambdas, const Vector& theta, double sigma_x,
                             double sigma_y, Eigen::Index n, Family family, const StreamFactory& streams)
{
    const Eigen::Index p = loadings.rows();
    const Eigen::Index d = loadings.cols();
    auto factor_rng = streams.stream("factors");
    auto design_rng = streams.stream("design-noise");
    auto response_rng = streams.stream("response-noise");

    FactorDraw out;
    out.factors = standard_normal(factor_rng, n, d);
    out.x = out.factors * lambdas.asDiagonal() * loadings.transpose();
    out.x += sigma_x * standard_normal(design_rng, n, p);

    const Vector signal = out.factors * theta;
    if (family == Family::Gaussian) {
        out.y = signal + sigma_y * standard_normal(response_rng, n);
    } else {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        out.y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i)
            out.y[i] = unif(response_rng) < sigmoid(signal[i]) ? 1.0 : 0.0;
    }
    return out;
}

// Pulls an orthonormal s x d block towards equal row norms (every row with
// leverage d/s) by alternating row rescaling with the polar factor. Both steps
// act on the right or scale rows, so rows sharing a plane keep sharing one.
Matrix balance_rows(Matrix orth)
{
    const double target = std::sqrt(static_cast<double>(orth.cols()) / static_cast<double>(orth.rows()));
    for (int iter = 0; iter < 500; ++iter) {
        const Vector norms = orth.rowwise().norm();
        if ((norms.array() - target).abs().maxCoeff() < 1e-10 || norms.minCoeff() <= 0.0)
            break;
        const Matrix scaled = (target * norms.cwiseInverse()).asDiagonal() * orth;
        Eigen::JacobiSVD<Matrix> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
        orth = svd.matrixU() * svd.matrixV().transpose();
    }
    return orth;
}

} // namespace

void validate(const ScenarioSpec& spec)
{
    auto fail = [](const std::string& msg) { throw InvalidSpec("scenario: " + msg); };
    if (spec.n < 1 || spec.p < 2)
        fail("need n >= 1 and p >= 2");
    if (spec.d < 1 || spec.d >= spec.p)
        fail("need 1 <= d < p");
    if (spec.s < spec.d || spec.s > spec.p)
        fail("need d <= s <= p");
    if (spec.lambdas.size() != spec.d)
        fail("lambdas must have d entries");
    if (spec.theta.size() != spec.d)
        fail("theta must have d entries");
    for (Eigen::Index i = 0; i < spec.d; ++i) {
        if (!(spec.lambdas[i] > 0.0))
            fail("lambdas must be positive");
        if (i > 0 && spec.lambdas[i] > spec.lambdas[i - 1])
            fail("lambdas must be in descending order");
    }
    if (static_cast<Eigen::Index>(spec.support.size()) != spec.s)
        fail("support pattern must list exactly s indices");
    const std::set<Eigen::Index> support(spec.support.begin(), spec.support.end());
    if (static_cast<Eigen::Index>(support.size()) != spec.s)
        fail("support pattern has duplicate indices");
    for (Eigen::Index j : support)
        if (j < 0 || j >= spec.p)
            fail("support index out of range");
    const std::set<Eigen::Index> zeros(spec.phi_zero.begin(), spec.phi_zero.end());
    if (zeros.size() != spec.phi_zero.size())
        fail("phi_zero set has duplicate indices");
    for (Eigen::Index j : zeros)
        if (!support.count(j))
            fail("phi_zero set must be a subset of the support");
    if (!zeros.empty()) {
        if (spec.d < 2)
            fail("a phi_zero set needs d >= 2 (its rows live in a (d-1)-dimensional subspace)");
        if (static_cast<Eigen::Index>(zeros.size()) > spec.s - 1)
            fail("phi_zero set must leave at least one unconstrained support row");
    }
    const double sx = resolved_sigma_x(spec);
    if (!(sx > 0.0))
        fail("sigma_x must be positive");
    if (!(spec.lambdas[spec.d - 1] > sx))
        fail("spike condition lambda_d > sigma_x violated");
    if (!spec.target_snr_y && !(spec.sigma_y > 0.0))
        fail("sigma_y must be positive");
    if (spec.target_snr_y && !(*spec.target_snr_y > 0.0))
        fail("target SNR_y must be positive");
}

double resolved_sigma_x(const ScenarioSpec& spec)
{
    if (spec.target_snr_x)
        return sigma_x_for_snr(spec.lambdas, spec.p, *spec.target_snr_x);
    return spec.sigma_x;
}

Matrix build_loadings(const ScenarioSpec& spec)
{
    validate(spec);
    const StreamFactory streams(spec.seed);
    auto rng = streams.stream("construction");

    std::vector<Eigen::Index> rows = spec.support;
    std::sort(rows.begin(), rows.end());
    const std::set<Eigen::Index> zeros(spec.phi_zero.begin(), spec.phi_zero.end());

    const Eigen::Index s = spec.s;
    const Eigen::Index d = spec.d;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Matrix block = standard_normal(rng, s, d);
        if (!zeros.empty()) {
            const Matrix plane = standard_normal(rng, d, d - 1);
            for (Eigen::Index r = 0; r < s; ++r)
                if (zeros.count(rows[static_cast<std::size_t>(r)]))
                    block.row(r) = (plane * standard_normal(rng, d - 1)).transpose();
        }
        Eigen::ColPivHouseholderQR<Matrix> rank_check(block);
        if (rank_check.rank() < d)
            continue;
        const Matrix orth = balance_rows(orthonormalize_columns(block));
        Matrix loadings = Matrix::Zero(spec.p, d);
        for (Eigen::Index r = 0; r < s; ++r)
            loadings.row(rows[static_cast<std::size_t>(r)]) = orth.row(r);
        return loadings;
    }
    throw InvalidSpec("build_loadings: could not draw a full-rank support block");
}

ThetaCalibration calibrate_theta(const Matrix& loadings, const ScenarioSpec& spec)
{
    validate(spec);
    if (loadings.rows() != spec.p || loadings.cols() != spec.d)
        throw InvalidInput("calibrate_theta: loadings must be p x d");
    const double sx = resolved_sigma_x(spec);

    ThetaCalibration out;
    if (spec.phi_zero.empty()) {
        out.theta = spec.theta;
        out.phi = loadings * spec.lambdas.cwiseProduct(out.theta);
        out.beta_star = beta_from(loadings, spec.lambdas, out.theta, sx);
        return out;
    }

    const Matrix nulls = null_directions(loadings, spec.phi_zero);
    if (nulls.cols() == 0)
        throw InvalidSpec("calibrate_theta: phi_zero rows span all d directions");
    double magnitude = spec.theta.norm();
    if (!(magnitude > 0.0))
        magnitude = 1.0;

    const StreamFactory streams(spec.seed);
    auto rng = streams.stream("theta-direction");
    const std::set<Eigen::Index> zeros(spec.phi_zero.begin(), spec.phi_zero.end());
    for (int attempt = 0; attempt < kThetaAttempts; ++attempt) {
        Vector w = nulls.cols() == 1 ? Vector(nulls.col(0)) : Vector(nulls * standard_normal(rng, nulls.cols()));
        if (attempt > 0 && nulls.cols() == 1)
            w = -w;
        w.normalize();
        const Vector theta = magnitude * w.cwiseQuotient(spec.lambdas);
        const Vector beta = beta_from(loadings, spec.lambdas, theta, sx);
        bool full_support = true;
        for (Eigen::Index j : spec.support)
            if (std::abs(beta[j]) < 1e-8)
                full_support = false;
        if (!full_support) {
            if (nulls.cols() == 1 && attempt > 0)
                break;
            continue;
        }
        out.theta = theta;
        out.phi = loadings * spec.lambdas.cwiseProduct(theta);
        const double scale = std::max(1.0, out.phi.cwiseAbs().maxCoeff());
        for (Eigen::Index j : zeros) {
            if (std::abs(out.phi[j]) > 1e-12 * scale)
                throw InvalidSpec("calibrate_theta: marginal correlation did not vanish on phi_zero rows");
            out.phi[j] = 0.0;
        }
        out.beta_star = beta;
        return out;
    }
    throw InvalidSpec("calibrate_theta: no direction keeps beta* non-zero on the whole support "
                      "(are the lambdas distinct?)");
}

GeneratedDataset generate(const ScenarioSpec& spec)
{
    validate(spec);
    GeneratedDataset data;
    data.spec = spec;
    data.lambdas = spec.lambdas;
    data.sigma_x = resolved_sigma_x(spec);
    data.loadings = build_loadings(spec);
    const ThetaCalibration cal = calibrate_theta(data.loadings, spec);
    data.theta = cal.theta;
    data.phi = cal.phi;
    data.beta_star = cal.beta_star;
    data.sigma_y = spec.target_snr_y ? sigma_y_for_snr(data.loadings, spec.lambdas, data.beta_star, data.sigma_x,
                                                       spec.n, *spec.target_snr_y)
                                     : spec.sigma_y;

    FactorDraw draw = draw_factor_model(data.loadings, spec.lambdas, data.theta, data.sigma_x, data.sigma_y, spec.n,
                                        spec.family, StreamFactory(spec.seed));
    data.x = std::move(draw.x);
    data.y = std::move(draw.y);
    data.factors = std::move(draw.factors);
    return data;
}

double snr_x(const Vector& lambdas, Eigen::Index p, double sigma_x)
{
    if (!(sigma_x > 0.0) || p < 1)
        throw InvalidInput("snr_x: need sigma_x > 0 and p >= 1");
    return std::sqrt(lambdas.squaredNorm() / (static_cast<double>(p) * sigma_x * sigma_x));
}

double snr_y(const Matrix& loadings, const Vector& lambdas, const Vector& beta_star, double sigma_x, double sigma_y,
             Eigen::Index n)
{
    if (!(sigma_y > 0.0) || n < 1)
        throw InvalidInput("snr_y: need sigma_y > 0 and n >= 1");
    const Vector projected = lambdas.asDiagonal() * (loadings.transpose() * beta_star);
    const double signal = projected.squaredNorm() + sigma_x * sigma_x * beta_star.squaredNorm();
    return std::sqrt(signal / (static_cast<double>(n) * sigma_y * sigma_y));
}

double sigma_x_for_snr(const Vector& lambdas, Eigen::Index p, double target)
{
    if (!(target > 0.0))
        throw InvalidInput("sigma_x_for_snr: target must be positive");
    return std::sqrt(lambdas.squaredNorm() / (static_cast<double>(p) * target * target));
}

double sigma_y_for_snr(const Matrix& loadings, const Vector& lambdas, const Vector& beta_star, double sigma_x,
                       Eigen::Index n, double target)
{
    if (!(target > 0.0))
        throw InvalidInput("sigma_y_for_snr: target must be positive");
    const Vector projected = lambdas.asDiagonal() * (loadings.transpose() * beta_star);
    const double signal = projected.squaredNorm() + sigma_x * sigma_x * beta_star.squaredNorm();
    return std::sqrt(signal / (static_cast<double>(n) * target * target));
}

SnrPair snr_of(const ScenarioSpec& spec)
{
    validate(spec);
    const double sx = resolved_sigma_x(spec);
    const Matrix loadings = build_loadings(spec);
    const ThetaCalibration cal = calibrate_theta(loadings, spec);
    SnrPair out;
    out.x = snr_x(spec.lambdas, spec.p, sx);
    const double sy = spec.target_snr_y ? sigma_y_for_snr(loadings, spec.lambdas, cal.beta_star, sx, spec.n,
                                                          *spec.target_snr_y)
                                        : spec.sigma_y;
    out.y = snr_y(loadings, spec.lambdas, cal.beta_star, sx, sy, spec.n);
    return out;
}

GeneratedDataset semi_synthetic(const Matrix& x_real, const SemiSyntheticParams& params)
{
    const Eigen::Index n_real = x_real.rows();
    const Eigen::Index p = x_real.cols();
    const Eigen::Index d = params.d;
    if (d < 1 || d >= p)
        throw InvalidInput("semi_synthetic: need 1 <= d < p");
    if (params.keep_rows < d || params.keep_rows > p)
        throw InvalidInput("semi_synthetic: keep_rows must lie in [d, p]");
    if (!x_real.allFinite())
        throw InvalidInput("semi_synthetic: non-finite design");

    const Matrix centred = x_real.rowwise() - x_real.colwise().mean();
    Eigen::BDCSVD<Matrix> svd(centred, Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    if (sv.size() < d || !(sv[d - 1] > 1e-10 * std::max(sv[0], 1e-300)))
        throw InvalidInput("semi_synthetic: design has rank below d");

    const Matrix v = svd.matrixV().leftCols(d);
    const Vector leverage = v.rowwise().squaredNorm();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return leverage[a] > leverage[b]; });
    std::vector<Eigen::Index> kept(order.begin(), order.begin() + params.keep_rows);
    std::sort(kept.begin(), kept.end());

    Matrix truncated = Matrix::Zero(p, d);
    for (Eigen::Index j : kept)
        truncated.row(j) = v.row(j);
    Matrix block(params.keep_rows, d);
    for (std::size_t r = 0; r < kept.size(); ++r)
        block.row(static_cast<Eigen::Index>(r)) = truncated.row(kept[r]);
    const Matrix orth = orthonormalize_columns(block);
    Matrix loadings = Matrix::Zero(p, d);
    for (std::size_t r = 0; r < kept.size(); ++r)
        loadings.row(kept[r]) = orth.row(static_cast<Eigen::Index>(r));

    const Vector lambdas = sv.head(d) / std::sqrt(static_cast<double>(n_real));

    ScenarioSpec spec;
    spec.name = "semi-synthetic";
    spec.n = params.n > 0 ? params.n : n_real;
    spec.p = p;
    spec.d = d;
    spec.s = params.keep_rows;
    spec.lambdas = lambdas;
    spec.theta = params.theta.size() == d ? params.theta : Vector::Ones(d);
    spec.sigma_x = params.sigma_x > 0.0 ? params.sigma_x : 0.5 * lambdas[d - 1];
    spec.sigma_y = params.sigma_y;
    spec.target_snr_y = params.target_snr_y;
    spec.support = kept;
    spec.seed = params.seed;
    validate(spec);

    GeneratedDataset data;
    data.spec = spec;
    data.lambdas = lambdas;
    data.sigma_x = spec.sigma_x;
    data.loadings = loadings;
    const ThetaCalibration cal = calibrate_theta(loadings, spec);
    data.theta = cal.theta;
    data.phi = cal.phi;
    data.beta_star = cal.beta_star;
    data.sigma_y = spec.target_snr_y
                       ? sigma_y_for_snr(loadings, lambdas, data.beta_star, data.sigma_x, spec.n, *spec.target_snr_y)
                       : spec.sigma_y;
    FactorDraw draw = draw_factor_model(loadings, lambdas, data.theta, data.sigma_x, data.sigma_y, spec.n,
                                        spec.family, StreamFactory(spec.seed));
    data.x = std::move(draw.x);
    data.y = std::move(draw.y);
    data.factors = std::move(draw.factors);
    return data;
}

AssumptionReport check_assumptions(const GeneratedDataset& data, std::optional<double> tau)
{
    const ScenarioSpec& spec = data.spec;
    AssumptionReport report;
    const Vector& lam = data.lambdas;
    const bool gap = spec.d == 1 || lam[0] - lam[spec.d - 1] > 0.0;
    report.a4_spiked = gap && lam[spec.d - 1] > data.sigma_x;

    const double logp = std::log(static_cast<double>(spec.p));
    const double s = static_cast<double>(spec.s);
    report.a5_ratio = static_cast<double>(spec.n) / ((s * s + static_cast<double>(spec.d)) * logp);
    report.a5_sample_size = report.a5_ratio >= 1.0;

    const Vector leverage = data.loadings.rowwise().squaredNorm();
    Eigen::Index nonzero = 0;
    double min_lev = std::numeric_limits<double>::infinity();
    bool prop1 = true;
    for (Eigen::Index j = 0; j < leverage.size(); ++j) {
        if (leverage[j] > 0.0) {
            ++nonzero;
            min_lev = std::min(min_lev, leverage[j]);
        } else if (data.beta_star[j] != 0.0) {
            prop1 = false;
        }
    }
    report.a6_sparsity = nonzero <= spec.s;
    report.min_leverage = nonzero > 0 ? min_lev : 0.0;
    if (tau)
        report.a6_leverage = report.min_leverage > 2.0 * *tau;
    report.proposition1 = prop1;
    return report;
}

namespace {

ScenarioSpec preset_base(Eigen::Index p, std::uint64_t seed)
{
    ScenarioSpec spec;
    spec.n = 100;
    spec.p = p;
    spec.d = 3;
    spec.lambdas = Vector(3);
    spec.lambdas << 8.0, 6.0, 4.0;
    spec.sigma_x = 1.0;
    spec.sigma_y = 1.0;
    spec.seed = seed;
    return spec;
}

} // namespace

ScenarioSpec favorable_suffpcr(Eigen::Index p, std::uint64_t seed)
{
    ScenarioSpec spec = preset_base(p, seed);
    spec.name = "favorableSuffPCR";
    spec.s = 15;
    spec.support.resize(15);
    std::iota(spec.support.begin(), spec.support.end(), Eigen::Index{0});
    spec.phi_zero = {10, 11, 12, 13, 14};
    spec.theta = Vector::Constant(3, 8.0);
    return spec;
}

ScenarioSpec favorable_screening(Eigen::Index p, std::uint64_t seed)
{
    ScenarioSpec spec = preset_base(p, seed);
    spec.name = "favorableScreening";
    spec.s = 10;
    spec.support.resize(10);
    std::iota(spec.support.begin(), spec.support.end(), Eigen::Index{0});
    spec.theta = Vector::Constant(3, 1.0);
    return spec;
}

} // namespace suffpcr
