#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "circle/config.hpp"
#include "circle/diophantine.hpp"
#include "circle/error.hpp"
#include "circle/expr.hpp"
#include "circle/graphflow.hpp"
#include "circle/lab.hpp"
#include "circle/normalform.hpp"
#include "circle/russmann.hpp"

using namespace circle;
using nlohmann::json;

namespace {

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::pair<double, double> parse_pair(const std::string& text, double alpha) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) fail(ErrorKind::ParseError, "expected lo,hi: " + text);
  const Variables vars{{"alpha", alpha}};
  return {evaluate_expression(text.substr(0, comma), vars), evaluate_expression(text.substr(comma + 1), vars)};
}

struct Axis {
  double lo = 0.0, hi = 0.0;
  int steps = 1;
  double at(int i) const { return steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1); }
};

// "nu=lo:hi:n,eta=lo:hi:n[,eps=lo:hi:n]"; a bare value means a single point.
std::map<std::string, Axis> parse_grid(const std::string& text, double alpha) {
  std::map<std::string, Axis> axes;
  std::stringstream ss(text);
  std::string part;
  const Variables vars{{"alpha", alpha}};
  while (std::getline(ss, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) fail(ErrorKind::ParseError, "grid: expected name=lo:hi:n in '" + part + "'");
    const std::string name = part.substr(0, eq);
    if (name != "nu" && name != "eta" && name != "eps") fail(ErrorKind::ParseError, "grid: unknown axis " + name);
    std::vector<std::string> f;
    std::stringstream fs(part.substr(eq + 1));
    for (std::string x; std::getline(fs, x, ':');) f.push_back(x);
    Axis a;
    if (f.size() == 1) {
      a.lo = a.hi = evaluate_expression(f[0], vars);
    } else if (f.size() == 3) {
      a.lo = evaluate_expression(f[0], vars);
      a.hi = evaluate_expression(f[1], vars);
      a.steps = std::stoi(f[2]);
      if (a.steps < 2) fail(ErrorKind::ParseError, "grid: need at least 2 steps on " + name);
    } else {
      fail(ErrorKind::ParseError, "grid: expected name=lo:hi:n in '" + part + "'");
    }
    axes[name] = a;
  }
  return axes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant circles of dissipative twist maps"};
  app.require_subcommand(1);

  // dioph certify
  auto* dioph = app.add_subcommand("dioph", "Diophantine utilities");
  dioph->require_subcommand(1);
  auto* certify_cmd = dioph->add_subcommand("certify", "Certify (gamma, q) for alpha up to K");
  std::string alpha_text = "golden";
  double q = 1.0;
  int K = 2000;
  certify_cmd->add_option("--alpha", alpha_text, "alpha as an expression")->required();
  certify_cmd->add_option("--q", q, "exponent q");
  certify_cmd->add_option("--K", K, "largest k checked");

  // Flags override fields of the config file; without a file they make up the whole config.
  std::string config_path, nu_text, eta_text, eps_text, run_alpha, pert_path;
  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run config JSON");
    cmd->add_option("--nu", nu_text, "nu (expression, may use alpha)");
    cmd->add_option("--eta", eta_text, "eta");
    cmd->add_option("--eps", eps_text, "eps");
    cmd->add_option("--alpha", run_alpha, "alpha (expression)");
    cmd->add_option("--perturbation", pert_path, "perturbation JSON file");
  };
  auto run_config = [&] {
    json j = config_path.empty() ? json::object() : load_json(config_path);
    const std::filesystem::path base = config_path.empty() ? std::filesystem::path() : std::filesystem::path(config_path).parent_path();
    if (!nu_text.empty()) j["nu"] = nu_text;
    if (!eta_text.empty()) j["eta"] = eta_text;
    if (!eps_text.empty()) j["eps"] = eps_text;
    if (!run_alpha.empty()) j["alpha"] = run_alpha;
    if (!pert_path.empty()) {
      j.erase("perturbation");
      j["perturbation_file"] = std::filesystem::absolute(pert_path).string();
    }
    if (!j.contains("eta")) fail(ErrorKind::ParseError, "eta is required (--eta or the config file)");
    return parse_config(j, base);
  };

  auto* gt = app.add_subcommand("solve-gt", "Invariant circle by the graph transform");
  add_config(gt);
  double gt_tol = 1e-10, gt_k = 0.0;
  int gt_grid = 1024;
  std::string gt_csv;
  gt->add_option("--tol", gt_tol, "fixed-point tolerance");
  gt->add_option("--k", gt_k, "Lipschitz budget (default eta/6)");
  gt->add_option("--grid", gt_grid, "graph nodes");
  gt->add_option("--csv", gt_csv, "write the graph as CSV");

  auto* russ = app.add_subcommand("russmann", "Translated curve by Newton's method");
  add_config(russ);

  auto* calpha = app.add_subcommand("c-alpha", "Root of lambda in nu");
  add_config(calpha);
  std::string bracket;
  calpha->add_option("--bracket", bracket, "lo,hi (expressions may use alpha)")->required();

  auto* nf_cmd = app.add_subcommand("normal-form", "Normal form around the translated curve");
  add_config(nf_cmd);
  int nf_k = 4;
  nf_cmd->add_option("--k", nf_k, "normal-form order");

  auto* cls = app.add_subcommand("classify", "Region tags on a parameter grid (CSV)");
  add_config(cls);
  std::string grid_text;
  bool cls_solve = false;
  cls->add_option("--grid", grid_text, "nu=lo:hi:n,eta=lo:hi:n[,eps=...]")->required();
  cls->add_flag("--solve", cls_solve, "also solve for lambda in every cell");

  auto* sweep = app.add_subcommand("sweep", "Parameter-space sweep with persistence");
  std::string spec_path, out_path, svg_path;
  bool resume = false;
  sweep->add_option("--spec", spec_path, "sweep spec JSON")->required();
  sweep->add_option("--out", out_path, "results CSV")->required();
  sweep->add_option("--svg", svg_path, "region figure");
  sweep->add_flag("--resume", resume, "continue an interrupted run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (certify_cmd->parsed()) {
      const auto d = certify(evaluate_expression(alpha_text), q, K);
      print({{"alpha", d.alpha}, {"gamma", d.gamma}, {"q", d.q}, {"K", d.cutoff_K}});
    } else if (gt->parsed()) {
      const auto c = run_config();
      CircleOptions o;
      o.tol = gt_tol;
      o.k = gt_k;
      o.grid = gt_grid;
      const auto ic = solve_invariant_circle(c.params, c.pert, o);
      const auto& g = ic.fixed_point.graph;
      print({{"residual", ic.fixed_point.residual},
             {"iterations", ic.fixed_point.iterations},
             {"k", ic.k},
             {"C", ic.C},
             {"multistart_spread", ic.multistart_spread},
             {"grid", g.size()},
             {"graph", g.values()}});
      if (!gt_csv.empty()) {
        std::ofstream out(gt_csv);
        if (!out) fail(ErrorKind::IoError, "cannot write " + gt_csv);
        out << "theta,rho\n";
        for (int j = 0; j < g.size(); ++j) out << fmt(kTwoPi * j / g.size()) << ',' << fmt(g.values()[j]) << '\n';
      }
    } else if (russ->parsed()) {
      const auto c = run_config();
      const auto tc = solve_translated_curve(c.params, c.pert);
      print({{"lambda", tc.lambda}, {"defect", tc.defect}, {"iterations", tc.iterations},
             {"gamma", tc.gamma}, {"h", tc.p}});
    } else if (calpha->parsed()) {
      const auto c = run_config();
      const auto [lo, hi] = parse_pair(bracket, c.params.alpha.alpha);
      const auto r = find_c_alpha(c.params, c.pert, lo, hi);
      print({{"nu_star", r.nu_star}, {"lambda", r.curve.lambda}, {"defect", r.curve.defect},
             {"K", r.K}, {"evaluations", r.evaluations}});
    } else if (nf_cmd->parsed()) {
      const auto c = run_config();
      const auto tc = solve_translated_curve(c.params, c.pert);
      const auto nf = reduce(localize(c.params, c.pert, tc), c.params.alpha, nf_k);
      json ab = json::array(), bb = json::array();
      for (int i = 1; i <= nf.k; ++i) {
        ab.push_back(nf.alpha_bar[i]);
        bb.push_back(nf.beta_bar[i]);
      }
      print({{"alpha_bar", ab},
             {"beta_bar", bb},
             {"lambda", nf.lambda},
             {"residual_report",
              {{"angular", nf.residual_angular},
               {"radial", nf.residual_radial},
               {"max", nf.max_residual},
               {"mean_log_B1", nf.log_beta1},
               {"roundtrip", roundtrip_error(c.params, tc, nf)},
               {"commutation", commutation_error(c.params, c.pert, tc, nf)}}}});
    } else if (cls->parsed()) {
      const auto c = run_config();
      auto axes = parse_grid(grid_text, c.params.alpha.alpha);
      if (!axes.count("nu")) axes["nu"] = Axis{c.params.nu, c.params.nu, 1};
      if (!axes.count("eta")) axes["eta"] = Axis{c.params.eta, c.params.eta, 1};
      if (!axes.count("eps")) axes["eps"] = Axis{c.params.eps, c.params.eps, 1};
      RegionOptions ro;
      ro.solve_lambda = cls_solve;
      std::cout << "nu,eta,eps,region_tag,residual\n";
      for (int a = 0; a < axes["eps"].steps; ++a)
        for (int b = 0; b < axes["eta"].steps; ++b)
          for (int d = 0; d < axes["nu"].steps; ++d) {
            Params p = c.params;
            p.eps = axes["eps"].at(a);
            p.eta = axes["eta"].at(b);
            p.nu = axes["nu"].at(d);
            const auto r = classify_region(p, c.pert, ro);
            std::cout << fmt(p.nu) << ',' << fmt(p.eta) << ',' << fmt(p.eps) << ',' << to_string(r.tag) << ','
                      << (r.residual ? fmt(*r.residual) : "") << '\n';
          }
    } else if (sweep->parsed()) {
      const auto spec = load_sweep_spec(spec_path);
      SweepOptions o;
      o.out = out_path;
      o.resume = resume;
      const auto res = run_sweep(spec, o);
      if (!svg_path.empty()) emit_figures(res.reports, res.c_alpha, FigureFormat::Svg, svg_path, spec.alpha.alpha);
      std::cerr << "cells " << res.reports.size() << " (resumed " << res.resumed << ", computed " << res.computed
                << "), fatal errors " << res.fatal_errors << '\n';
      return res.fatal_errors == 0 ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
