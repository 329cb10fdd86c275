#pragma once

#include <functional>
#include <vector>

#include "circle/maps.hpp"

namespace circle {

/// A planar map (angle lift, radial) -> (angle lift, radial) of degree one.
using PlaneMap = std::function<Point(const Point&)>;

/// Graph of phi: T -> [-band, band] sampled on the uniform grid 2 pi j / M,
/// piecewise linear in between.
class LipGraph {
 public:
  LipGraph() : LipGraph(std::vector<double>(4, 0.0), 0.0) {}
  LipGraph(std::vector<double> values, double lip_k, double band = 1.0);
  static LipGraph constant(int grid, double value, double lip_k, double band = 1.0);

  int size() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }
  double lip_k() const { return lip_k_; }
  double band() const { return band_; }
  double measured_lip() const { return measured_lip_; }
  double operator()(double theta) const;

 private:
  std::vector<double> values_;
  double lip_k_;
  double band_;
  double measured_lip_;
};

/// Largest adjacent-node slope of periodic samples.
double max_adjacent_slope(const std::vector<double>& values);

struct GateReport {
  double eps = 0.0, k = 0.0, eta = 0.0, A = 0.0, c = 0.0;
  bool condition1 = false;  // eps <= pi/(6A) eta k
  bool condition2 = false;  // k <= eta/6
  bool condition3 = false;  // eta <= c
  bool admissible = false;
  double margin = 0.0;  // smallest slack of the three inequalities
};

inline constexpr double kDefaultGateCap = 0.3;

GateReport gate(const Params& p, const Perturbation& pert, double k, double c = kDefaultGateCap);

/// e^{-2 pi eta} + eps A_g + 2 pi k + eps k A_f
double contraction_bound(const Params& p, const Perturbation& pert, double k);

/// Graph transform of `phi` under `map`; every node is pulled back through
/// the angle component by a bracketed root solve on one grid interval.
/// Throws NotMonotone, LipBudgetExceeded, OutOfDomain.
LipGraph graph_transform(const PlaneMap& map, const LipGraph& phi);
/// Gate-checked transform for the raw map Q. Throws GateRejected.
LipGraph graph_transform(const Params& p, const Perturbation& pert, const LipGraph& phi,
                         double c = kDefaultGateCap);

/// sup_j |R_j - phi(Theta_j)| over the images (Theta_j, R_j) of the graph nodes.
double invariance_residual(const PlaneMap& map, const LipGraph& phi);

PlaneMap raw_map(const Params& p, const Perturbation& pert, double band = kDefaultBand);

struct ContractionReport {
  double analytic = 0.0;
  double empirical = 0.0;  // max ratio over the random pairs
  std::vector<double> ratios;
};

ContractionReport measure_contraction(const Params& p, const Perturbation& pert, double k,
                                      int grid = 1024, int pairs = 20, unsigned seed = 7u,
                                      double c = kDefaultGateCap);

struct FixedPointResult {
  LipGraph graph;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> steps;  // sup |Gamma phi - phi| per iteration
};

/// Iterates the transform until sup|Gamma phi - phi| <= tol (1 - C).
/// Throws NoConvergence after max_iter.
FixedPointResult iterate_graph_transform(const PlaneMap& map, LipGraph start, double C, double tol,
                                         int max_iter);

struct InvariantCircle {
  FixedPointResult fixed_point;
  double k = 0.0;
  double C = 0.0;
  GateReport gate;
  double multistart_spread = 0.0;  // sup distance between the three starts
  bool unique = false;
};

struct CircleOptions {
  double k = 0.0;  // 0: eta / 6
  double tol = 1e-10;
  int grid = 1024;
  int max_grid = 16384;  // the grid doubles up to this while the residual exceeds tol
  double c = kDefaultGateCap;
  bool multistart = true;
};

/// Throws GateRejected, NoConvergence.
InvariantCircle solve_invariant_circle(const Params& p, const Perturbation& pert,
                                       const CircleOptions& opt = {});

struct BasinReport {
  int seeds = 0;
  int converged = 0;
  int max_iterations = 0;
  double worst_distance = 0.0;
};

/// Random seeds in T x [-1, 1] iterated under Q until within `within` of the graph.
BasinReport basin_check(const Params& p, const Perturbation& pert, const LipGraph& graph,
                        int seeds = 100, int max_iter = 500, double within = 1e-6,
                        unsigned seed = 11u);

/// Smallest eta in (0, c] admitted by the gate at k = eta / 6.
double eta_min(const Perturbation& pert, double eps, double c = kDefaultGateCap);

}  // namespace circle
