#include "suffpcr/serialize.hpp"

#include "suffpcr/csv.hpp"
#include "suffpcr/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace suffpcr {

namespace {

void emit(std::ostringstream& out, const Json& v, int indent, int depth)
{
    const auto newline = [&](int level) {
        if (indent < 0)
            return;
        out << '\n' << std::string(static_cast<std::size_t>(indent * level), ' ');
    };
    switch (v.type()) {
    case Json::value_t::object: {
        if (v.empty()) {
            out << "{}";
            return;
        }
        out << '{';
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            out << (first ? "" : ",");
            first = false;
            newline(depth + 1);
            out << Json(it.key()).dump() << (indent < 0 ? ":" : ": ");
            emit(out, it.value(), indent, depth + 1);
        }
        newline(depth);
        out << '}';
        return;
    }
    case Json::value_t::array: {
        if (v.empty()) {
            out << "[]";
            return;
        }
        // Arrays of scalars stay on one line.
        const bool flat = std::none_of(v.begin(), v.end(), [](const Json& e) { return e.is_structured(); });
        out << '[';
        bool first = true;
        for (const auto& e : v) {
            out << (first ? "" : (flat && indent >= 0 ? ", " : ","));
            first = false;
            if (!flat)
                newline(depth + 1);
            emit(out, e, indent, depth + 1);
        }
        if (!flat)
            newline(depth);
        out << ']';
        return;
    }
    case Json::value_t::number_float: {
        const double d = v.get<double>();
        if (!std::isfinite(d))
            out << "null";
        else
            out << format_number(d);
        return;
    }
    default:
        out << v.dump();
    }
}

} // namespace

std::string dump_json(const Json& value, int indent)
{
    std::ostringstream out;
    emit(out, value, indent, 0);
    return out.str();
}

void write_json(const std::filesystem::path& path, const Json& value)
{
    std::ofstream out(path);
    if (!out)
        throw InvalidInput("cannot write '" + path.string() + "'");
    out << dump_json(value) << '\n';
}

Json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path.string() + "'", 0, 0);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError("'" + path.string() + "': " + e.what(), 0, 0);
    }
}

Json to_json(const Vector& v)
{
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v[i]);
    return out;
}

Json to_json(const Matrix& m)
{
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        out.push_back(to_json(Vector(m.row(r).transpose())));
    return out;
}

Vector vector_from_json(const Json& j)
{
    if (!j.is_array())
        throw InvalidInput("expected a JSON array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw InvalidInput("expected a number at index " + std::to_string(i));
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

Matrix matrix_from_json(const Json& j)
{
    if (!j.is_array())
        throw InvalidInput("expected a JSON array of rows");
    if (j.empty())
        return Matrix(0, 0);
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const Vector row = vector_from_json(j[r]);
        if (row.size() != cols)
            throw InvalidInput("ragged matrix at row " + std::to_string(r));
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

Json to_json(const FitResult& fit)
{
    Json j;
    j["family"] = to_string(fit.family);
    j["intercept"] = fit.intercept;
    j["beta"] = to_json(fit.beta);
    j["gamma"] = to_json(fit.gamma);
    j["selected"] = fit.selected;
    j["loadings"] = to_json(fit.loadings);
    if (fit.scaling) {
        j["scaling"] = {{"means", to_json(fit.scaling->means)},
                        {"scales", to_json(fit.scaling->scales)},
                        {"y_mean", fit.scaling->y_mean}};
    }
    return j;
}

FitResult fit_from_json(const Json& j)
{
    try {
        FitResult fit;
        fit.family = family_from_string(j.at("family").get<std::string>());
        fit.intercept = j.at("intercept").get<double>();
        fit.beta = vector_from_json(j.at("beta"));
        if (j.contains("gamma"))
            fit.gamma = vector_from_json(j.at("gamma"));
        if (j.contains("selected"))
            fit.selected = j.at("selected").get<std::vector<Eigen::Index>>();
        if (j.contains("loadings"))
            fit.loadings = matrix_from_json(j.at("loadings"));
        if (j.contains("scaling")) {
            const Json& s = j.at("scaling");
            Standardization st;
            st.means = vector_from_json(s.at("means"));
            st.scales = vector_from_json(s.at("scales"));
            st.y_mean = s.at("y_mean").get<double>();
            if (st.means.size() != fit.beta.size() || st.scales.size() != fit.beta.size())
                throw InvalidInput("scaling length differs from beta");
            fit.scaling = std::move(st);
        }
        return fit;
    } catch (const Json::exception& e) {
        throw InvalidInput(std::string("malformed fit record: ") + e.what());
    }
}

Json to_json(const ThresholdReport& report)
{
    Json j;
    j["sorted_leverage"] = to_json(report.sorted_leverage);
    j["weighted_variance"] = to_json(report.weighted_variance);
    j["first_difference"] = to_json(report.first_difference);
    j["cut_index"] = report.cut_index;
    j["threshold"] = report.threshold;
    j["selected"] = report.selected;
    j["no_elbow"] = report.no_elbow;
    return j;
}

Json to_json(const ScenarioSpec& spec)
{
    Json j;
    j["name"] = spec.name;
    j["n"] = spec.n;
    j["p"] = spec.p;
    j["d"] = spec.d;
    j["s"] = spec.s;
    j["lambdas"] = to_json(spec.lambdas);
    j["theta"] = to_json(spec.theta);
    j["sigma_x"] = spec.sigma_x;
    j["sigma_y"] = spec.sigma_y;
    j["support"] = spec.support;
    j["phi_zero"] = spec.phi_zero;
    j["family"] = to_string(spec.family);
    j["seed"] = spec.seed;
    if (spec.target_snr_x)
        j["target_snr_x"] = *spec.target_snr_x;
    if (spec.target_snr_y)
        j["target_snr_y"] = *spec.target_snr_y;
    return j;
}

ScenarioSpec scenario_from_json(const Json& j, ScenarioSpec spec)
{
    if (!j.is_object())
        throw InvalidSpec("scenario must be a JSON object");
    try {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& k = it.key();
            const Json& v = it.value();
            if (k == "name")
                spec.name = v.get<std::string>();
            else if (k == "n")
                spec.n = v.get<Eigen::Index>();
            else if (k == "p")
                spec.p = v.get<Eigen::Index>();
            else if (k == "d")
                spec.d = v.get<Eigen::Index>();
            else if (k == "s")
                spec.s = v.get<Eigen::Index>();
            else if (k == "lambdas")
                spec.lambdas = vector_from_json(v);
            else if (k == "theta")
                spec.theta = vector_from_json(v);
            else if (k == "sigma_x")
                spec.sigma_x = v.get<double>();
            else if (k == "sigma_y")
                spec.sigma_y = v.get<double>();
            else if (k == "support")
                spec.support = v.get<std::vector<Eigen::Index>>();
            else if (k == "phi_zero")
                spec.phi_zero = v.get<std::vector<Eigen::Index>>();
            else if (k == "family")
                spec.family = family_from_string(v.get<std::string>());
            else if (k == "seed")
                spec.seed = v.get<std::uint64_t>();
            else if (k == "target_snr_x")
                spec.target_snr_x = v.get<double>();
            else if (k == "target_snr_y")
                spec.target_snr_y = v.get<double>();
            else
                throw InvalidSpec("unknown scenario field '" + k + "'");
        }
    } catch (const Json::exception& e) {
        throw InvalidSpec(std::string("malformed scenario: ") + e.what());
    } catch (const InvalidInput& e) {
        throw InvalidSpec(std::string("malformed scenario: ") + e.what());
    }
    return spec;
}

Json truth_json(const GeneratedDataset& data)
{
    Json j;
    j["beta_star"] = to_json(data.beta_star);
    j["support"] = data.true_support();
    j["phi"] = to_json(data.phi);
    j["loadings"] = to_json(data.loadings);
    j["theta"] = to_json(data.theta);
    j["lambdas"] = to_json(data.lambdas);
    j["sigma_x"] = data.sigma_x;
    j["sigma_y"] = data.sigma_y;
    j["scenario"] = to_json(data.spec);
    return j;
}

Json to_json(const Hyper& hyper)
{
    Json j;
    j["method"] = hyper.method;
    if (hyper.d > 0)
        j["d"] = hyper.d;
    if (std::isfinite(hyper.lambda))
        j["lambda"] = hyper.lambda;
    if (hyper.lambda_index >= 0)
        j["lambda_index"] = hyper.lambda_index;
    if (!hyper.threshold.empty())
        j["threshold"] = hyper.threshold;
    if (std::isfinite(hyper.threshold_value))
        j["threshold_value"] = hyper.threshold_value;
    if (hyper.screen_size > 0)
        j["screen_size"] = hyper.screen_size;
    j["tuned"] = hyper.tuned;
    return j;
}

Json to_json(const EvalReport& report)
{
    Json j;
    j["method"] = report.method;
    j["family"] = to_string(report.family);
    if (report.family == Family::Gaussian)
        j["test_mse"] = report.test_mse;
    else
        j["test_accuracy"] = report.test_accuracy;
    j["validation_score"] = report.validation_score;
    j["n_selected"] = report.n_selected;
    if (report.precision)
        j["precision"] = *report.precision;
    if (report.recall)
        j["recall"] = *report.recall;
    j["chosen"] = to_json(report.chosen);
    if (!report.note.empty())
        j["note"] = report.note;
    Json trace = Json::array();
    for (const auto& t : report.trace) {
        Json e = to_json(t.hyper);
        if (t.failed) {
            e["error"] = t.error;
        } else {
            e["validation_score"] = t.validation_score;
            e["n_selected"] = t.n_selected;
        }
        trace.push_back(std::move(e));
    }
    j["trace"] = std::move(trace);
    if (!report.roc.empty()) {
        Json roc = Json::array();
        for (const auto& [fpr, tpr] : report.roc)
            roc.push_back({fpr, tpr});
        j["roc"] = std::move(roc);
    }
    return j;
}

} // namespace suffpcr
