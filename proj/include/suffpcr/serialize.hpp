#pragma once

#include "suffpcr/glm.hpp"
#include "suffpcr/pipeline.hpp"
#include "suffpcr/simgen.hpp"
#include "suffpcr/thresholding.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace suffpcr {

using Json = nlohmann::ordered_json;

/// Like Json::dump, but every floating-point number is written with 17
/// significant digits. Non-finite numbers become null.
std::string dump_json(const Json& value, int indent = 2);
void write_json(const std::filesystem::path& path, const Json& value);
Json read_json(const std::filesystem::path& path);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);  // array of rows
Vector vector_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);

Json to_json(const FitResult& fit);
FitResult fit_from_json(const Json& j);

Json to_json(const ThresholdReport& report);
Json to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const Json& j, ScenarioSpec base = {});

/// beta*, its support, Phi, V_d and the generating scenario.
Json truth_json(const GeneratedDataset& data);

Json to_json(const Hyper& hyper);
Json to_json(const EvalReport& report);

} // namespace suffpcr
