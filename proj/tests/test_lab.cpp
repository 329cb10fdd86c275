#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "circle/error.hpp"
#include "circle/lab.hpp"

using namespace circle;
namespace fs = std::filesystem;

namespace {

nlohmann::json base_spec() {
  return nlohmann::json::parse(R"({
    "alpha": "golden",
    "eps_list": [1e-4],
    "eta_range": [0.01, 0.2], "eta_steps": 50,
    "nu_range": ["alpha - 0.05", "alpha + 0.05"], "nu_steps": 50,
    "perturbation": {"f": [[0, {"N": 1, "coeffs": [[0, 0.2], [0, 0], [0, -0.2]]}]],
                     "g": [[0, {"N": 1, "coeffs": [[0.2, 0], [0, 0], [0.2, 0]]}]]},
    "pipeline": "gate-only", "seed": 7})");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("circle_lab_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("spec parsing") {
  const auto s = parse_sweep_spec(base_spec());
  CHECK(s.cell_count() == 2500);
  CHECK(s.eta_at(0) == 0.01);
  CHECK(s.eta_at(49) == 0.2);
  CHECK(std::abs(s.nu_at(0) - (s.alpha.alpha - 0.05)) < 1e-16);
  const auto p = s.cell_params(51);
  CHECK(p.eta == s.eta_at(1));
  CHECK(p.nu == s.nu_at(1));
  auto bad = base_spec();
  bad["eta_steps"] = 1;
  CHECK_THROWS_AS(parse_sweep_spec(bad), Error);
  bad = base_spec();
  bad["nu_range"] = {0.7, 0.6};
  CHECK_THROWS_AS(parse_sweep_spec(bad), Error);
  bad = base_spec();
  bad["eps_list"] = nlohmann::json::array();
  CHECK_THROWS_AS(parse_sweep_spec(bad), Error);
  bad = base_spec();
  bad["pipeline"] = "sometimes";
  CHECK_THROWS_AS(parse_sweep_spec(bad), Error);
  auto other = base_spec();
  other["seed"] = 8;
  CHECK(spec_hash(parse_sweep_spec(other)) != spec_hash(s));
}

TEST_CASE("eps = 0 sweep") {
  auto j = base_spec();
  j["eps_list"] = {0.0};
  j["eta_steps"] = 8;
  j["nu_steps"] = 9;
  const auto spec = parse_sweep_spec(j);
  const auto res = run_sweep(spec);
  REQUIRE(res.complete);
  CHECK(res.reports.size() == 72);
  for (const auto& r : res.reports)
    if (r.gate_admissible) CHECK(r.tag == RegionTag::Thm1);
  REQUIRE(res.c_alpha.size() == 8);
  for (const auto& c : res.c_alpha) {
    REQUIRE(c.nu_star);
    CHECK(std::abs(*c.nu_star - spec.alpha.alpha) <= 1e-15);
  }
  const auto dir = scratch("svg0");
  emit_figures(res.reports, res.c_alpha, FigureFormat::Svg, dir / "f.svg", spec.alpha.alpha);
  const auto svg = slurp(dir / "f.svg");
  const auto at = svg.find("id=\"c_alpha\"");
  REQUIRE(at != std::string::npos);
  // every vertex of the traced polyline has the same x
  const auto pts_begin = svg.find("points=\"", at) + 8;
  std::stringstream pts(svg.substr(pts_begin, svg.find('"', pts_begin) - pts_begin));
  std::string xy, first_x;
  int n = 0;
  while (pts >> xy) {
    const auto x = xy.substr(0, xy.find(','));
    if (n++ == 0) first_x = x;
    CHECK(x == first_x);
  }
  CHECK(n == 8);
  fs::remove_all(dir);
}

TEST_CASE("single cell equals classify_region") {
  auto j = base_spec();
  j["eta_range"] = {0.05, 0.05};
  j["eta_steps"] = 1;
  j["nu_range"] = {"alpha + 0.01", "alpha + 0.01"};
  j["nu_steps"] = 1;
  j["pipeline"] = "full";
  const auto spec = parse_sweep_spec(j);
  const auto res = run_sweep(spec);
  REQUIRE(res.reports.size() == 1);
  RegionOptions o;
  o.solve_lambda = true;
  const auto direct = classify_region(spec.cell_params(0), spec.pert, o);
  const auto& r = res.reports[0];
  CHECK(r.tag == direct.tag);
  CHECK(r.lambda == direct.lambda);
  CHECK(r.residual == direct.residual);
  CHECK(r.gate_admissible == direct.gate_admissible);
}

TEST_CASE("cone boundary of the below-gate region") {
  const auto spec = parse_sweep_spec(base_spec());
  const auto res = run_sweep(spec);
  const double a = spec.alpha.alpha, cell = spec.nu_at(1) - spec.nu_at(0);
  int rows = 0;
  for (const auto& row : cone_boundary(res.reports, 1e-4)) {
    const double half = row.eta / std::sqrt(kTwoPi);
    if (a + half >= spec.nu_hi) continue;  // cone wider than the window
    REQUIRE(row.nu_right);
    REQUIRE(row.nu_left);
    CHECK(std::abs(*row.nu_right - (a + half)) <= cell);
    CHECK(std::abs(*row.nu_left - (a - half)) <= cell);
    ++rows;
  }
  CHECK(rows > 20);
  // the traced C_alpha lies inside the cone
  for (const auto& c : res.c_alpha) {
    REQUIRE(c.nu_star);
    CHECK(std::sqrt(kTwoPi) * std::abs(*c.nu_star - a) <= c.eta);
  }
  // gate monotone in eta on every nu column
  for (int j = 0; j < spec.nu_steps; ++j) {
    bool seen = false;
    for (int i = 0; i < spec.eta_steps; ++i) {
      const bool ok = res.reports[i * spec.nu_steps + j].gate_admissible;
      if (seen) CHECK(ok);
      seen = seen || ok;
    }
  }
}

TEST_CASE("determinism, persistence and resume") {
  auto j = base_spec();
  j["eta_steps"] = 12;
  j["nu_steps"] = 10;
  j["pipeline"] = "full";
  const auto spec = parse_sweep_spec(j);
  const auto dir = scratch("resume");
  SweepOptions a;
  a.out = dir / "a.csv";
  a.threads = 1;
  const auto ra = run_sweep(spec, a);
  CHECK(ra.complete);
  CHECK(ra.fatal_errors == 0);
  SweepOptions b = a;
  b.out = dir / "b.csv";
  b.threads = 4;
  run_sweep(spec, b);
  CHECK(slurp(a.out) == slurp(b.out));
  CHECK(slurp(c_alpha_path(a.out)) == slurp(c_alpha_path(b.out)));

  // interrupted after 37 cells, with a torn last line, then resumed
  SweepOptions c = a;
  c.out = dir / "c.csv";
  c.max_cells = 37;
  const auto rc = run_sweep(spec, c);
  CHECK_FALSE(rc.complete);
  CHECK(rc.computed == 37);
  { std::ofstream(c.out, std::ios::app) << "37,0.0001,0.01"; }
  c.max_cells = -1;
  c.resume = true;
  const auto rr = run_sweep(spec, c);
  CHECK(rr.resumed == 37);
  CHECK(rr.computed == spec.cell_count() - 37);
  CHECK(slurp(c.out) == slurp(a.out));
  CHECK(rr.reports.size() == ra.reports.size());

  const auto meta = nlohmann::json::parse(slurp(sidecar_path(a.out)));
  CHECK(meta["spec_hash"] == spec_hash(spec));
  auto changed = j;
  changed["seed"] = 99;
  CHECK_THROWS_AS(run_sweep(parse_sweep_spec(changed), c), Error);
  fs::remove_all(dir);
}

TEST_CASE("per-cell failures are recorded, not fatal") {
  auto j = base_spec();
  j["eps_list"] = {0.05};  // beyond the Newton solver's plausibility bound
  j["eta_steps"] = 2;
  j["nu_steps"] = 2;
  j["pipeline"] = "full";
  j["trace_c_alpha"] = false;
  const auto res = run_sweep(parse_sweep_spec(j));
  CHECK(res.complete);
  CHECK(res.fatal_errors == 0);
  for (const auto& r : res.reports) {
    CHECK_FALSE(r.error.empty());
    CHECK_FALSE(r.lambda);
  }
}

TEST_CASE("figures") {
  auto j = base_spec();
  j["eta_steps"] = 3;
  j["nu_steps"] = 3;
  const auto spec = parse_sweep_spec(j);
  const auto res = run_sweep(spec);
  const auto dir = scratch("fig");
  emit_figures(res.reports, res.c_alpha, FigureFormat::Csv, dir / "none.csv", spec.alpha.alpha,
               std::vector<RegionTag>{});
  const auto text = slurp(dir / "none.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(text.rfind("cell,eps,eta,nu,region_tag", 0) == 0);
  emit_figures(res.reports, res.c_alpha, FigureFormat::Csv, dir / "all.csv", spec.alpha.alpha);
  const auto all = slurp(dir / "all.csv");
  CHECK(std::count(all.begin(), all.end(), '\n') == 10);
  CHECK_THROWS_AS(emit_figures({}, {}, FigureFormat::Svg, dir / "x.svg", 0.5), Error);
  CHECK_THROWS_AS(emit_figures(res.reports, {}, FigureFormat::Svg, dir / "no/such/dir/x.svg", 0.5), Error);
  fs::remove_all(dir);
}

TEST_CASE("thread count from the environment") {
  setenv("CIRCLE_LAB_THREADS", "3", 1);
  CHECK(lab_threads() == 3);
  setenv("CIRCLE_LAB_THREADS", "junk", 1);
  CHECK(lab_threads() >= 1);
  unsetenv("CIRCLE_LAB_THREADS");
}
