#include "suffpcr/csv.hpp"
#include "suffpcr/errors.hpp"
#include "suffpcr/experiment.hpp"
#include "suffpcr/pipeline.hpp"
#include "suffpcr/serialize.hpp"
#include "suffpcr/simgen.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace suffpcr;
namespace fs = std::filesystem;

namespace {

struct ModelFlags
{
    std::string method = "suffpcr";
    std::vector<int> d{3};
    std::string lambda_grid;
    std::string threshold = "auto";
    std::string family = "gaussian";
    std::string projection = "approx";
    std::uint64_t seed = 1;
    int folds = 5;
};

struct InputFlags
{
    std::string x;
    std::string y;
    std::string y_column;
    bool log1p_response = false;
};

void add_model_flags(CLI::App* app, ModelFlags& f)
{
    app->add_option("--method", f.method, "suffpcr, fps-pcr, oracle, ridge, lasso, elastic-net, dense-pcr, screen-pcr")
        ->capture_default_str();
    app->add_option("--d", f.d, "Subspace dimension(s)")->capture_default_str();
    app->add_option("--lambda-grid", f.lambda_grid, "Comma-separated penalty values (default: automatic grid)");
    app->add_option("--threshold", f.threshold, "auto, none, or a leverage value")->capture_default_str();
    app->add_option("--family", f.family, "gaussian or binomial")
        ->check(CLI::IsMember({"gaussian", "binomial"}))
        ->capture_default_str();
    app->add_option("--projection", f.projection, "exact or approx")
        ->check(CLI::IsMember({"exact", "approx"}))
        ->capture_default_str();
    app->add_option("--seed", f.seed, "Random seed")->capture_default_str();
}

void add_input_flags(CLI::App* app, InputFlags& f, bool need_y)
{
    app->add_option("--x", f.x, "Feature CSV (rows are samples)")->required()->check(CLI::ExistingFile);
    auto* y = app->add_option("--y", f.y, "Single-column response CSV")->check(CLI::ExistingFile);
    auto* yc = app->add_option("--y-column", f.y_column, "Response column inside the feature CSV");
    y->excludes(yc);
    if (need_y)
        app->callback([app, y, yc] {
            if (y->count() == 0 && yc->count() == 0)
                throw CLI::RequiredError(app->get_name() + ": one of --y or --y-column");
        });
    app->add_flag("--log1p-response", f.log1p_response, "Replace Y with log(Y + 1)");
}

std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || !(v >= 0.0))
            throw InvalidInput("--lambda-grid: bad value '" + item + "'");
        out.push_back(v);
    }
    return out;
}

Pipeline make_pipeline(const ModelFlags& f)
{
    Pipeline p;
    p.family = family_from_string(f.family);
    p.method.kind = method_from_string(f.method);
    p.method.d_values = f.d;
    p.method.threshold = ThresholdMode::parse(f.threshold);
    p.method.projection = f.projection == "exact" ? ProjectionMode::Exact : ProjectionMode::Approximate;
    if (!f.lambda_grid.empty())
        p.method.lambdas = parse_grid(f.lambda_grid);
    return p;
}

LoadedData load_inputs(const InputFlags& f)
{
    CsvOptions options;
    options.log1p_response = f.log1p_response;
    if (!f.y.empty())
        return load_csv(f.x, fs::path(f.y), options);
    if (!f.y_column.empty())
        return load_csv(f.x, f.y_column, options);
    LoadedData out;
    CsvTable t = read_csv(f.x, options);
    out.x = std::move(t.values);
    out.feature_names = std::move(t.columns);
    return out;
}

bool single_candidate(const Pipeline& p)
{
    const MethodSpec& m = p.method;
    switch (m.kind) {
    case MethodKind::Oracle:
        return true;
    case MethodKind::DensePcr:
        return m.d_values.size() == 1;
    case MethodKind::ScreenThenPcr:
        return m.d_values.size() == 1 && m.screen_sizes.size() == 1;
    case MethodKind::SuffPcr:
    case MethodKind::FpsPcr:
        return m.d_values.size() == 1 && m.lambdas.size() == 1;
    default:
        return m.lambdas.size() == 1;
    }
}

int cmd_simulate(const std::string& preset, const std::string& scenario_path, Eigen::Index p, Eigen::Index n,
                 std::uint64_t seed, const std::string& out_dir)
{
    ScenarioSpec spec = preset_scenario(preset, p, seed);
    if (!scenario_path.empty())
        spec = scenario_from_json(read_json(scenario_path), spec);
    if (n > 0)
        spec.n = n;
    spec.seed = seed;
    const GeneratedDataset data = generate(spec);
    fs::create_directories(out_dir);
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < data.x.cols(); ++j)
        names.push_back("x" + std::to_string(j + 1));
    write_csv(fs::path(out_dir) / "X.csv", data.x, names);
    write_vector_csv(fs::path(out_dir) / "Y.csv", data.y, "y");
    write_json(fs::path(out_dir) / "truth.json", truth_json(data));
    std::cout << "wrote " << data.x.rows() << " x " << data.x.cols() << " design to " << out_dir << "\n";
    return 0;
}

int cmd_fit(const InputFlags& in, const ModelFlags& mf, const std::string& out_path, const std::string& report_path)
{
    const LoadedData data = load_inputs(in);
    const Pipeline pipeline = make_pipeline(mf);
    std::vector<Eigen::Index> all(static_cast<std::size_t>(data.x.rows()));
    std::iota(all.begin(), all.end(), Eigen::Index{0});

    FitResult fit;
    Json report;
    if (single_candidate(pipeline)) {
        const Standardization st = learn_standardization(data.x, data.y);
        const Vector y = pipeline.family == Family::Gaussian ? Vector(data.y.array() - st.y_mean) : data.y;
        std::vector<TraceEntry> failures;
        auto candidates = fit_candidates(pipeline, apply_standardization(st, data.x), y, &failures);
        if (candidates.empty())
            throw PipelineError(failures.empty() ? "fit failed" : failures.front().error);
        fit = std::move(candidates.front().fit);
        if (pipeline.family == Family::Gaussian)
            fit.intercept += st.y_mean;
        fit.scaling = st;
        report = to_json(candidates.front().hyper);
    } else {
        auto [best, eval] = tune_kfold(pipeline, data.x, data.y, all, {}, mf.folds, mf.seed);
        fit = std::move(best);
        report = to_json(eval);
    }
    Json j = to_json(fit);
    j["feature_names"] = data.feature_names;
    write_json(out_path, j);
    if (!report_path.empty())
        write_json(report_path, report);
    std::cout << "selected " << fit.selected.size() << " of " << fit.beta.size() << " features; fit written to "
              << out_path << "\n";
    return 0;
}

int cmd_predict(const std::string& fit_path, const InputFlags& in, const std::string& out_path)
{
    const Json j = read_json(fit_path);
    const FitResult fit = fit_from_json(j);
    const LoadedData data = load_inputs(in);
    const Vector pred = predict_raw(fit, data.x);
    write_vector_csv(out_path, pred, fit.family == Family::Binomial ? "probability" : "prediction");
    return 0;
}

int cmd_roc(const InputFlags& in, const ModelFlags& mf, const std::string& truth_path, int grid,
            const std::string& out_path)
{
    const LoadedData data = load_inputs(in);
    Pipeline pipeline = make_pipeline(mf);
    const Json truth = read_json(truth_path);
    const auto support = truth.at("support").get<std::vector<Eigen::Index>>();
    if (pipeline.method.kind == MethodKind::Oracle)
        pipeline.method.oracle_support = support;
    const auto points = roc_sweep(pipeline, data.x, data.y, support, grid);
    Matrix m(static_cast<Eigen::Index>(points.size()), 2);
    for (std::size_t i = 0; i < points.size(); ++i) {
        m(static_cast<Eigen::Index>(i), 0) = points[i].first;
        m(static_cast<Eigen::Index>(i), 1) = points[i].second;
    }
    write_csv(out_path, m, {"fpr", "tpr"});
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sparse principal component regression toolkit"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "Worker threads for replications")->check(CLI::PositiveNumber);

    auto* sim = app.add_subcommand("simulate", "Draw a dataset from a factor-model scenario");
    std::string preset = "favorable-suffpcr", scenario_path, sim_out = "simulated";
    Eigen::Index sim_p = 300, sim_n = 0;
    std::uint64_t sim_seed = 1;
    sim->add_option("--preset", preset, "favorable-suffpcr or favorable-screening")->capture_default_str();
    sim->add_option("--scenario", scenario_path, "JSON scenario overriding the preset")->check(CLI::ExistingFile);
    sim->add_option("--p", sim_p, "Number of features")->capture_default_str();
    sim->add_option("--n", sim_n, "Number of rows (default from the scenario)");
    sim->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
    sim->add_option("--out", sim_out, "Output directory")->capture_default_str();

    auto* fit = app.add_subcommand("fit", "Fit a model to CSV data and write it as JSON");
    InputFlags fit_in;
    ModelFlags fit_model;
    std::string fit_out = "fit.json", fit_report;
    add_input_flags(fit, fit_in, true);
    add_model_flags(fit, fit_model);
    fit->add_option("--folds", fit_model.folds, "Cross-validation folds when a grid is tuned")->capture_default_str();
    fit->add_option("--out", fit_out, "Output JSON")->capture_default_str();
    fit->add_option("--report", fit_report, "Optional JSON with the tuning trace");

    auto* pred = app.add_subcommand("predict", "Score new rows with a saved fit");
    InputFlags pred_in;
    std::string pred_fit, pred_out = "predictions.csv";
    pred->add_option("--fit", pred_fit, "Fit JSON from the fit command")->required()->check(CLI::ExistingFile);
    add_input_flags(pred, pred_in, false);
    pred->add_option("--out", pred_out, "Output CSV")->capture_default_str();

    auto* bench = app.add_subcommand("benchmark", "Run an experiment described by a JSON config");
    std::string config_path;
    std::uint64_t bench_seed = 0;
    bench->add_option("config", config_path, "Experiment config")->required();
    bench->add_option("--seed", bench_seed, "Override the config seed");

    auto* roc = app.add_subcommand("roc", "Trace a selection ROC curve against a known support");
    InputFlags roc_in;
    ModelFlags roc_model;
    std::string roc_truth, roc_out = "roc.csv";
    int roc_grid = 30;
    add_input_flags(roc, roc_in, true);
    add_model_flags(roc, roc_model);
    roc->add_option("--truth", roc_truth, "truth.json from simulate")->required()->check(CLI::ExistingFile);
    roc->add_option("--grid-size", roc_grid, "Number of lambda values")->capture_default_str();
    roc->add_option("--out", roc_out, "Output CSV")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help and version requests exit 0; usage errors share the config exit code.
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(preset, scenario_path, sim_p, sim_n, sim_seed, sim_out);
        if (fit->parsed())
            return cmd_fit(fit_in, fit_model, fit_out, fit_report);
        if (pred->parsed())
            return cmd_predict(pred_fit, pred_in, pred_out);
        if (roc->parsed())
            return cmd_roc(roc_in, roc_model, roc_truth, roc_grid, roc_out);
        if (bench->parsed()) {
            ExperimentConfig config = load_config(config_path);
            if (app.get_option("--threads")->count())
                config.threads = threads;
            if (bench->get_option("--seed")->count())
                config.seed = bench_seed;
            const ExperimentResult result = run_experiment(config);
            std::cout << dump_json(result.summary.at("methods")) << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
