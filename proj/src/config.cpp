#include "circle/config.hpp"

#include <fstream>

#include "circle/diophantine.hpp"
#include "circle/error.hpp"
#include "circle/expr.hpp"

namespace circle {

double json_number(const nlohmann::json& v, double alpha) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return evaluate_expression(v.get<std::string>(), Variables{{"alpha", alpha}});
  fail(ErrorKind::ParseError, "expected a number or expression, got " + v.dump());
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

Perturbation load_perturbation(const std::filesystem::path& path) {
  try {
    return load_json(path).get<Perturbation>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

Perturbation default_perturbation() { return Perturbation::sin_cos(1.0); }

RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) fail(ErrorKind::ParseError, "config must be a JSON object");
  RunConfig c;
  c.source = j;
  try {
    c.q = j.contains("q") ? json_number(j["q"]) : 1.0;
    c.K = j.value("K", 2000);
    const double alpha = json_number(j.value("alpha", nlohmann::json("golden")));
    c.params.alpha = certify(alpha, c.q, c.K);
    c.params.nu = j.contains("nu") ? json_number(j["nu"], alpha) : alpha;
    if (j.contains("eta")) c.params.eta = json_number(j["eta"], alpha);
    if (j.contains("eps")) c.params.eps = json_number(j["eps"], alpha);
    if (j.contains("perturbation")) c.pert = j["perturbation"].get<Perturbation>();
    else if (j.contains("perturbation_file")) c.pert = load_perturbation(base_dir / j["perturbation_file"].get<std::string>());
    else c.pert = default_perturbation();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(load_json(path), path.parent_path());
}

}  // namespace circle
