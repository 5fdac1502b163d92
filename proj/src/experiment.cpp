#include "suffpcr/experiment.hpp"

#include "suffpcr/csv.hpp"
#include "suffpcr/errors.hpp"
#include "suffpcr/metrics.hpp"
#include "suffpcr/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

namespace suffpcr {

ScenarioSpec preset_scenario(const std::string& name, Eigen::Index p, std::uint64_t seed)
{
    if (name == "favorable-suffpcr")
        return favorable_suffpcr(p, seed);
    if (name == "favorable-screening")
        return favorable_screening(p, seed);
    throw InvalidSpec("unknown scenario preset '" + name + "' (expected favorable-suffpcr or favorable-screening)");
}

namespace {

// ---------------------------------------------------------------------------
// Config parsing

std::size_t line_at(const std::string& text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::string escape_regex(const std::string& s)
{
    static const std::regex special(R"([.^$|()\[\]{}*+?\\])");
    return std::regex_replace(s, special, R"(\$&)");
}

class Locator
{
public:
    explicit Locator(const std::string& text) : text_(text) {}

    /// Best-effort line of `"key": value`, falling back to the key alone and
    /// then to the bare value.
    std::size_t find(const std::string& key, const std::string& value = {}) const
    {
        std::smatch m;
        if (!value.empty()) {
            const std::regex pair("\"" + escape_regex(key) + "\"\\s*:\\s*" + escape_regex(value));
            if (std::regex_search(text_, m, pair))
                return line_at(text_, static_cast<std::size_t>(m.position(0)));
            const auto pos = text_.find(value);
            if (pos != std::string::npos)
                return line_at(text_, pos);
        }
        const auto pos = text_.find("\"" + key + "\"");
        return pos == std::string::npos ? 1 : line_at(text_, pos);
    }

private:
    const std::string& text_;
};

class ConfigReader
{
public:
    ConfigReader(const std::string& text, std::filesystem::path base) : locator_(text), base_(std::move(base)) {}

    [[noreturn]] void fail(const std::string& field, const std::string& message, const Json* value = nullptr) const
    {
        const std::string leaf = field.substr(field.find_last_of('.') + 1);
        const std::string key = leaf.substr(0, leaf.find('['));
        const std::string shown = value && !value->is_structured() ? value->dump() : std::string{};
        throw ConfigError("line " + std::to_string(locator_.find(key, shown)) + ": field '" + field + "': " +
                          message);
    }

    void check_keys(const Json& obj, const std::string& where, const std::set<std::string>& allowed) const
    {
        if (!obj.is_object())
            fail(where, "expected an object");
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (!allowed.count(it.key()))
                fail(where.empty() ? it.key() : where + "." + it.key(), "unknown field");
    }

    template <class T>
    T get(const Json& obj, const std::string& key, const std::string& path) const
    {
        const Json& v = obj.at(key);
        try {
            return v.get<T>();
        } catch (const Json::exception&) {
            fail(path, "has the wrong type", &v);
        }
    }

    int positive_int(const Json& obj, const std::string& key, const std::string& path) const
    {
        const Json& v = obj.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 1)
            fail(path, "must be a positive integer", &v);
        return v.get<int>();
    }

    std::vector<double> number_list(const Json& v, const std::string& path) const
    {
        if (!v.is_array())
            fail(path, "must be an array of numbers", &v);
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number())
                fail(path, "must contain numbers only", &e);
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::filesystem::path resolve(const std::string& p) const
    {
        const std::filesystem::path path(p);
        return path.is_relative() && !base_.empty() ? base_ / path : path;
    }

    MethodEntry method(const Json& v, std::size_t index, Family family) const
    {
        const std::string where = "methods[" + std::to_string(index) + "]";
        MethodEntry entry;
        entry.pipeline.family = family;
        MethodSpec& m = entry.pipeline.method;
        Json obj = v;
        if (v.is_string())
            obj = Json{{"name", v}};
        check_keys(obj, where,
                   {"name", "label", "lambdas", "lambda_count", "d", "threshold", "projection", "rho", "max_iter",
                    "mixing", "screen_sizes"});
        if (!obj.contains("name"))
            fail(where + ".name", "is required");
        const std::string name = get<std::string>(obj, "name", where + ".name");
        try {
            m.kind = method_from_string(name);
        } catch (const InvalidInput& e) {
            fail(where + ".name", e.what(), &obj.at("name"));
        }
        entry.label = obj.contains("label") ? get<std::string>(obj, "label", where + ".label") : name;
        if (obj.contains("lambdas")) {
            m.lambdas = number_list(obj.at("lambdas"), where + ".lambdas");
            for (double l : m.lambdas)
                if (!(l > 0.0) && !(l == 0.0 && (m.kind == MethodKind::SuffPcr || m.kind == MethodKind::FpsPcr)))
                    fail(where + ".lambdas", "values must be positive");
        }
        if (obj.contains("lambda_count"))
            m.lambda_count = positive_int(obj, "lambda_count", where + ".lambda_count");
        if (obj.contains("d")) {
            const Json& d = obj.at("d");
            std::vector<double> ds = d.is_array() ? number_list(d, where + ".d") : std::vector<double>{};
            if (!d.is_array()) {
                if (!d.is_number_integer())
                    fail(where + ".d", "must be an integer or an array of integers", &d);
                ds.push_back(d.get<double>());
            }
            m.d_values.clear();
            for (double x : ds) {
                if (x < 1 || x != std::floor(x))
                    fail(where + ".d", "values must be positive integers");
                m.d_values.push_back(static_cast<int>(x));
            }
        }
        if (obj.contains("threshold")) {
            const Json& t = obj.at("threshold");
            try {
                m.threshold = ThresholdMode::parse(t.is_number() ? format_number(t.get<double>())
                                                                 : get<std::string>(obj, "threshold", where + ".threshold"));
            } catch (const InvalidInput& e) {
                fail(where + ".threshold", e.what(), &t);
            }
        }
        if (obj.contains("projection")) {
            const std::string p = get<std::string>(obj, "projection", where + ".projection");
            if (p == "exact")
                m.projection = ProjectionMode::Exact;
            else if (p == "approx")
                m.projection = ProjectionMode::Approximate;
            else
                fail(where + ".projection", "must be 'exact' or 'approx'", &obj.at("projection"));
        }
        if (obj.contains("rho")) {
            m.rho = get<double>(obj, "rho", where + ".rho");
            if (!(m.rho > 0.0))
                fail(where + ".rho", "must be positive", &obj.at("rho"));
        }
        if (obj.contains("max_iter"))
            m.max_iter = positive_int(obj, "max_iter", where + ".max_iter");
        if (obj.contains("mixing")) {
            m.mixing = get<double>(obj, "mixing", where + ".mixing");
            if (!(m.mixing > 0.0 && m.mixing <= 1.0))
                fail(where + ".mixing", "must lie in (0, 1]", &obj.at("mixing"));
        }
        if (obj.contains("screen_sizes")) {
            m.screen_sizes.clear();
            for (double k : number_list(obj.at("screen_sizes"), where + ".screen_sizes")) {
                if (k < 1 || k != std::floor(k))
                    fail(where + ".screen_sizes", "values must be positive integers");
                m.screen_sizes.push_back(static_cast<Eigen::Index>(k));
            }
        }
        if (family == Family::Binomial && (m.kind == MethodKind::Lasso || m.kind == MethodKind::ElasticNet))
            fail(where + ".name", "is available for the gaussian family only", &obj.at("name"));
        return entry;
    }

    ExperimentConfig parse(const Json& root) const
    {
        check_keys(root, "",
                   {"output_dir", "replications", "seed", "threads", "family", "scenario", "data", "proportions",
                    "cv_folds", "methods", "roc", "roc_grid", "diagnostics"});
        ExperimentConfig c;
        c.output_dir = resolve(root.contains("output_dir") ? get<std::string>(root, "output_dir", "output_dir")
                                                           : c.output_dir.string());
        if (root.contains("replications"))
            c.replications = positive_int(root, "replications", "replications");
        if (root.contains("seed")) {
            const Json& s = root.at("seed");
            if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
                fail("seed", "must be a non-negative integer", &s);
            c.seed = s.get<std::uint64_t>();
        }
        if (root.contains("threads"))
            c.threads = positive_int(root, "threads", "threads");
        if (root.contains("cv_folds")) {
            c.cv_folds = positive_int(root, "cv_folds", "cv_folds");
            if (c.cv_folds < 2)
                fail("cv_folds", "must be at least 2", &root.at("cv_folds"));
        }
        if (root.contains("roc"))
            c.roc = get<bool>(root, "roc", "roc");
        if (root.contains("roc_grid"))
            c.roc_grid = positive_int(root, "roc_grid", "roc_grid");
        if (root.contains("diagnostics"))
            c.diagnostics = get<bool>(root, "diagnostics", "diagnostics");

        if (root.contains("scenario") == root.contains("data"))
            fail(root.contains("scenario") ? "data" : "scenario", "exactly one of 'scenario' and 'data' is required");

        if (root.contains("scenario")) {
            const Json& s = root.at("scenario");
            if (!s.is_object())
                fail("scenario", "expected an object");
            ScenarioSpec base;
            Json overrides = s;
            if (s.contains("preset")) {
                const std::string preset = get<std::string>(s, "preset", "scenario.preset");
                const Eigen::Index p = s.contains("p") ? get<Eigen::Index>(s, "p", "scenario.p") : 300;
                try {
                    base = preset_scenario(preset, p, c.seed);
                } catch (const Error& e) {
                    fail("scenario.preset", e.what(), &s.at("preset"));
                }
                overrides.erase("preset");
                overrides.erase("p");
            }
            try {
                c.scenario = scenario_from_json(overrides, base);
                validate(*c.scenario);
            } catch (const InvalidSpec& e) {
                const std::string msg = e.what();
                std::string field = "scenario";
                static const std::regex unknown("unknown scenario field '([^']+)'");
                std::smatch m;
                if (std::regex_search(msg, m, unknown))
                    field += "." + m[1].str();
                fail(field, msg);
            }
            c.family = c.scenario->family;
        } else {
            const Json& d = root.at("data");
            check_keys(d, "data", {"x", "y", "y_column", "log1p_response"});
            DataSource src;
            if (!d.contains("x"))
                fail("data.x", "is required");
            src.x = resolve(get<std::string>(d, "x", "data.x"));
            if (d.contains("y") == d.contains("y_column"))
                fail("data.y", "exactly one of 'y' and 'y_column' is required");
            if (d.contains("y"))
                src.y = resolve(get<std::string>(d, "y", "data.y"));
            else
                src.y_column = get<std::string>(d, "y_column", "data.y_column");
            if (d.contains("log1p_response"))
                src.log1p_response = get<bool>(d, "log1p_response", "data.log1p_response");
            c.data = std::move(src);
        }
        if (root.contains("family")) {
            try {
                c.family = family_from_string(get<std::string>(root, "family", "family"));
            } catch (const InvalidInput& e) {
                fail("family", e.what(), &root.at("family"));
            }
            if (c.scenario)
                c.scenario->family = c.family;
        }
        if (root.contains("proportions")) {
            c.proportions = number_list(root.at("proportions"), "proportions");
            double total = 0.0;
            for (double v : c.proportions)
                total += v;
            if (c.proportions.size() != 3 || std::abs(total - 1.0) > 1e-9 ||
                std::any_of(c.proportions.begin(), c.proportions.end(), [](double v) { return !(v > 0.0); }))
                fail("proportions", "must be three positive numbers summing to 1");
        }

        if (!root.contains("methods"))
            fail("methods", "is required");
        const Json& methods = root.at("methods");
        if (!methods.is_array() || methods.empty())
            fail("methods", "must be a non-empty array");
        std::set<std::string> labels;
        for (std::size_t i = 0; i < methods.size(); ++i) {
            MethodEntry e = method(methods[i], i, c.family);
            if (!labels.insert(e.label).second)
                fail("methods[" + std::to_string(i) + "].label", "duplicate method label '" + e.label + "'");
            c.methods.push_back(std::move(e));
        }
        return c;
    }

private:
    Locator locator_;
    std::filesystem::path base_;
};

// ---------------------------------------------------------------------------
// Running

struct Dataset
{
    Matrix x;
    Vector y;
    std::optional<std::vector<Eigen::Index>> support;
};

struct Replication
{
    std::vector<ReplicationRecord> records;
    std::vector<std::vector<RocPoint>> roc;  // per method
};

Replication run_replication(const ExperimentConfig& config, const Dataset& shared, int r)
{
    const StreamFactory rep_streams = StreamFactory(config.seed).split(static_cast<std::uint64_t>(r));
    Dataset owned;
    const Dataset* data = &shared;
    if (config.scenario) {
        ScenarioSpec spec = *config.scenario;
        spec.n = 3 * config.scenario->n;
        spec.seed = rep_streams.master_seed();
        const GeneratedDataset g = generate(spec);
        owned.x = g.x;
        owned.y = g.y;
        owned.support = g.true_support();
        data = &owned;
    }

    const Eigen::Index n = data->x.rows();
    std::vector<double> proportions = config.proportions;
    if (proportions.empty())
        proportions = config.scenario ? std::vector<double>{1.0 / 3.0, 1.0 / 3.0, 1.0 - 2.0 / 3.0}
                                      : std::vector<double>{0.4, 0.3, 0.3};
    int max_d = 1;
    for (const auto& m : config.methods)
        for (int d : m.pipeline.method.d_values)
            max_d = std::max(max_d, d);
    std::mt19937_64 split_rng = rep_streams.stream("split");
    const Folds folds = split(n, proportions, split_rng(), std::max<Eigen::Index>(max_d + 2, 5));

    Replication out;
    out.roc.resize(config.methods.size());
    for (std::size_t k = 0; k < config.methods.size(); ++k) {
        const MethodEntry& entry = config.methods[k];
        Pipeline pipeline = entry.pipeline;
        if (pipeline.method.kind == MethodKind::Oracle && pipeline.method.oracle_support.empty() && data->support)
            pipeline.method.oracle_support = *data->support;

        ReplicationRecord rec;
        rec.label = entry.label;
        rec.replication = r;
        try {
            if (config.cv_folds > 1) {
                std::vector<Eigen::Index> pooled = folds.train;
                pooled.insert(pooled.end(), folds.validation.begin(), folds.validation.end());
                std::sort(pooled.begin(), pooled.end());
                std::mt19937_64 cv_rng = rep_streams.stream("cv", k);
                rec.report = tune_kfold(pipeline, data->x, data->y, pooled, folds.test, config.cv_folds, cv_rng(),
                                        data->support)
                                 .second;
            } else {
                rec.report = tune_and_fit(pipeline, data->x, data->y, folds, data->support).second;
            }
            rec.report.method = entry.label;
            if (config.roc && data->support) {
                const Matrix xt = take_rows(data->x, folds.train);
                const Vector yt = take_rows(data->y, folds.train);
                rec.report.roc = roc_sweep(pipeline, xt, yt, *data->support, config.roc_grid);
                out.roc[k] = rec.report.roc;
            }
        } catch (const Error& e) {
            rec.failed = true;
            rec.error = e.what();
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

std::string csv_number(double v)
{
    return std::isfinite(v) ? format_number(v) : std::string{};
}

std::string csv_text(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c == '\n' ? ' ' : c;
    }
    return q + "\"";
}

std::string safe_name(const std::string& label)
{
    std::string out;
    for (char c : label)
        out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
    return out;
}

void write_outputs(const ExperimentConfig& config, const ExperimentResult& result,
                   const std::vector<Replication>& reps)
{
    std::filesystem::create_directories(config.output_dir);
    {
        std::ofstream out(config.output_dir / "replications.csv");
        if (!out)
            throw InvalidInput("cannot write into '" + config.output_dir.string() + "'");
        out << "method,replication,mse,accuracy,n_selected,precision,recall,d,lambda,error\n";
        for (const auto& rec : result.records) {
            const EvalReport& rep = rec.report;
            out << csv_text(rec.label) << ',' << rec.replication << ',' << csv_number(rep.test_mse) << ','
                << csv_number(rep.test_accuracy) << ',';
            if (!rec.failed)
                out << rep.n_selected;
            out << ',' << (rep.precision ? csv_number(*rep.precision) : "") << ','
                << (rep.recall ? csv_number(*rep.recall) : "") << ',';
            if (rep.chosen.d > 0)
                out << rep.chosen.d;
            out << ',' << csv_number(rep.chosen.lambda) << ',' << csv_text(rec.error) << '\n';
        }
    }
    write_json(config.output_dir / "summary.json", result.summary);

    if (config.roc) {
        for (std::size_t k = 0; k < config.methods.size(); ++k) {
            std::ofstream out(config.output_dir / ("roc_" + safe_name(config.methods[k].label) + ".csv"));
            out << "replication,fpr,tpr\n";
            for (std::size_t r = 0; r < reps.size(); ++r)
                for (const auto& [fpr, tpr] : reps[r].roc[k])
                    out << r << ',' << format_number(fpr) << ',' << format_number(tpr) << '\n';
        }
    }

    if (config.diagnostics) {
        const auto dir = config.output_dir / "diagnostics";
        bool made = false;
        for (const auto& rec : result.records) {
            if (rec.failed || !rec.report.threshold)
                continue;
            if (!made)
                std::filesystem::create_directories(dir);
            made = true;
            Json j = to_json(*rec.report.threshold);
            j["method"] = rec.label;
            j["replication"] = rec.replication;
            j["chosen"] = to_json(rec.report.chosen);
            write_json(dir / ("threshold_" + safe_name(rec.label) + "_rep" + std::to_string(rec.replication) +
                              ".json"),
                       j);
        }
    }
}

Json quartiles(const std::vector<double>& values)
{
    if (values.empty())
        return nullptr;
    return {{"median", median(values)}, {"q1", quantile(values, 0.25)}, {"q3", quantile(values, 0.75)}};
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir)
{
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("line " + std::to_string(line_at(text, e.byte > 0 ? e.byte - 1 : 0)) +
                          ": invalid JSON: " + e.what());
    }
    if (!root.is_object())
        throw ConfigError("line 1: the configuration must be a JSON object");
    return ConfigReader(text, base_dir).parse(root);
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open configuration '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

Json summarize(const std::vector<ReplicationRecord>& records, const std::vector<MethodEntry>& methods)
{
    Json rows = Json::array();
    for (const auto& m : methods) {
        std::vector<double> mse, acc, nsel, prec, rec;
        int failures = 0;
        int count = 0;
        for (const auto& r : records) {
            if (r.label != m.label)
                continue;
            ++count;
            if (r.failed) {
                ++failures;
                continue;
            }
            if (std::isfinite(r.report.test_mse))
                mse.push_back(r.report.test_mse);
            if (std::isfinite(r.report.test_accuracy))
                acc.push_back(r.report.test_accuracy);
            nsel.push_back(static_cast<double>(r.report.n_selected));
            if (r.report.precision)
                prec.push_back(*r.report.precision);
            if (r.report.recall)
                rec.push_back(*r.report.recall);
        }
        Json row;
        row["method"] = m.label;
        row["kind"] = to_string(m.pipeline.method.kind);
        row["replications"] = count;
        row["failures"] = failures;
        if (m.pipeline.family == Family::Gaussian)
            row["mse"] = quartiles(mse);
        else
            row["accuracy"] = quartiles(acc);
        row["n_selected"] = quartiles(nsel);
        if (!prec.empty())
            row["precision"] = quartiles(prec);
        if (!rec.empty())
            row["recall"] = quartiles(rec);
        if (m.pipeline.method.kind == MethodKind::Oracle)
            row["note"] = "no tuning";
        rows.push_back(std::move(row));
    }
    return Json{{"methods", std::move(rows)}};
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool write)
{
    if (config.methods.empty())
        throw ConfigError("no methods configured");
    Dataset shared;
    if (config.data) {
        CsvOptions options;
        options.log1p_response = config.data->log1p_response;
        LoadedData loaded = config.data->y ? load_csv(config.data->x, *config.data->y, options)
                                           : load_csv(config.data->x, *config.data->y_column, options);
        shared.x = std::move(loaded.x);
        shared.y = std::move(loaded.y);
    }

    const int reps = config.replications;
    std::vector<Replication> results(static_cast<std::size_t>(reps));
    std::vector<std::string> errors(static_cast<std::size_t>(reps));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next++; r < reps; r = next++) {
            try {
                results[static_cast<std::size_t>(r)] = run_replication(config, shared, r);
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(r)] = e.what();
            }
        }
    };
    const int threads = std::clamp(config.threads, 1, std::max(1, reps));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    ExperimentResult result;
    for (int r = 0; r < reps; ++r) {
        const auto& err = errors[static_cast<std::size_t>(r)];
        if (!err.empty()) {
            // Replication-level failures (e.g. an impossible split) abort the run.
            throw PipelineError("replication " + std::to_string(r) + ": " + err);
        }
        for (auto& rec : results[static_cast<std::size_t>(r)].records)
            result.records.push_back(rec);
    }
    result.summary = summarize(result.records, config.methods);
    result.summary["replications"] = reps;
    result.summary["seed"] = config.seed;
    if (config.scenario)
        result.summary["scenario"] = to_json(*config.scenario);
    if (write)
        write_outputs(config, result, results);
    return result;
}

} // namespace suffpcr
