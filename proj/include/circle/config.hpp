#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "circle/maps.hpp"

namespace circle {

/// One run: parameters, rotation and perturbation.
///
/// JSON fields: alpha (number or expression, default "golden"), q (1), K (2000),
/// nu (number or expression that may use "alpha"; default alpha), eta, eps,
/// and either "perturbation" (inline, {"f": [[j, trigpoly], ...], "g": ...})
/// or "perturbation_file" (relative to the config file).
struct RunConfig {
  Params params;
  Perturbation pert;
  double q = 1.0;
  int K = 2000;
  nlohmann::json source;
};

/// Numbers pass through; strings go through evaluate_expression with `alpha`
/// bound when known. Throws ParseError.
double json_number(const nlohmann::json& v, double alpha = 0.0);

RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
/// Throws IoError, ParseError.
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);
Perturbation load_perturbation(const std::filesystem::path& path);

/// Default perturbation when none is given: f = sin theta, g = cos theta.
Perturbation default_perturbation();

}  // namespace circle
