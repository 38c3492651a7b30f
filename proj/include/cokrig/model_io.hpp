#pragma once

// JSON forms of the model parameter bundles and of the reports.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "cokrig/cokrige.hpp"
#include "cokrig/compat.hpp"
#include "cokrig/covmodels.hpp"

namespace cokrig {

using Json = nlohmann::ordered_json;

Json to_json(const BivMatern& th);
Json to_json(const BivGW& la);
Json to_json(const BivModel& model);

/// The kind follows the keys: "nu" selects the Matern model, "mu" the
/// Wendland model. Every key of the kind is required and no other key is
/// accepted. Throws ParseError.
BivModel model_from_json(const Json& j);

BivModel read_model_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);
Json read_json_file(const std::filesystem::path& path);

Json to_json(const CompatReport& report);
Json to_json(const PredictionReport& report);
Json to_json(const TailDiagnostic& diag);

}  // namespace cokrig
