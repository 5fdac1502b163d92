#pragma once

#include "suffpcr/pipeline.hpp"
#include "suffpcr/serialize.hpp"
#include "suffpcr/simgen.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace suffpcr {

struct MethodEntry
{
    std::string label;  // unique within an experiment; names output files
    Pipeline pipeline;
};

struct DataSource
{
    std::filesystem::path x;
    std::optional<std::filesystem::path> y;
    std::optional<std::string> y_column;
    bool log1p_response = false;
};

struct ExperimentConfig
{
    std::filesystem::path output_dir = "results";
    int replications = 1;
    std::uint64_t seed = 1;
    int threads = 1;
    Family family = Family::Gaussian;
    /// Simulation: `scenario.n` is the size of each of the three folds, so a
    /// replication draws 3n rows.
    std::optional<ScenarioSpec> scenario;
    std::optional<DataSource> data;
    std::vector<double> proportions;  // empty: equal thirds (simulation) or 0.4/0.3/0.3 (data)
    int cv_folds = 0;                 // > 1: K-fold tuning on train + validation rows
    std::vector<MethodEntry> methods;
    bool roc = false;
    int roc_grid = 30;
    bool diagnostics = true;
};

/// Parses and validates a JSON configuration. Throws ConfigError whose message
/// names the offending field and its line in `text`.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Preset scenarios by name: favorable-suffpcr, favorable-screening.
ScenarioSpec preset_scenario(const std::string& name, Eigen::Index p, std::uint64_t seed);

struct ReplicationRecord
{
    std::string label;
    int replication = 0;
    EvalReport report;
    bool failed = false;
    std::string error;
};

struct ExperimentResult
{
    std::vector<ReplicationRecord> records;  // ordered by (replication, method)
    Json summary;
};

/// Runs every replication (in parallel across `threads` workers) and, when
/// `write_outputs` is set, writes replications.csv, summary.json,
/// roc_<label>.csv and threshold diagnostics under output_dir.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_outputs = true);

/// Medians and quartiles per method label.
Json summarize(const std::vector<ReplicationRecord>& records, const std::vector<MethodEntry>& methods);

} // namespace suffpcr
