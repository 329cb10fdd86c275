#include "circle/graphflow.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "circle/error.hpp"
#include "circle/kernels.hpp"

namespace circle {

double max_adjacent_slope(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  return kernels::max_periodic_slope(values, kTwoPi / static_cast<double>(values.size()));
}

LipGraph::LipGraph(std::vector<double> values, double lip_k, double band)
    : values_(std::move(values)), lip_k_(lip_k), band_(band) {
  if (values_.size() < 4) fail(ErrorKind::PreconditionFailed, "graph grid too small");
  for (double v : values_)
    if (!(std::abs(v) <= band_)) fail(ErrorKind::OutOfDomain, "graph leaves the band");
  measured_lip_ = max_adjacent_slope(values_);
  if (measured_lip_ > lip_k_ * (1.0 + 1e-12) + 1e-15)
    fail(ErrorKind::LipBudgetExceeded, "measured Lipschitz constant " + std::to_string(measured_lip_) +
                                           " exceeds budget " + std::to_string(lip_k_));
}

LipGraph LipGraph::constant(int grid, double value, double lip_k, double band) {
  return LipGraph(std::vector<double>(static_cast<size_t>(grid), value), lip_k, band);
}

double LipGraph::operator()(double theta) const {
  const int m = size();
  const double h = kTwoPi / m;
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  const double s = t / h;
  int i = static_cast<int>(s);
  if (i >= m) i = m - 1;
  const double w = s - i;
  return (1.0 - w) * values_[i] + w * values_[(i + 1) % m];
}

GateReport gate(const Params& p, const Perturbation& pert, double k, double c) {
  if (!(k > 0.0)) fail(ErrorKind::PreconditionFailed, "k must be positive");
  GateReport g;
  g.eps = p.eps;
  g.k = k;
  g.eta = p.eta;
  g.A = pert.A;
  g.c = c;
  const double threshold = pert.A > 0.0 ? kPi / (6.0 * pert.A) * p.eta * k : INFINITY;
  g.condition1 = p.eps <= threshold;
  g.condition2 = k <= p.eta / 6.0;
  g.condition3 = p.eta > 0.0 && p.eta <= c;
  g.admissible = g.condition1 && g.condition2 && g.condition3;
  g.margin = std::min({threshold - p.eps, p.eta / 6.0 - k, c - p.eta});
  return g;
}

double contraction_bound(const Params& p, const Perturbation& pert, double k) {
  return contraction_factor(p) + p.eps * pert.A_g + kTwoPi * k + p.eps * k * pert.A_f;
}

PlaneMap raw_map(const Params& p, const Perturbation& pert, double band) {
  return [p, pert, band](const Point& x) { return eval_Q(p, pert, Frame::raw(), x, band); };
}

namespace {

struct NodeImages {
  std::vector<double> theta;  // M + 1 entries, the last one shifted by 2 pi
  std::vector<double> radial;
};

NodeImages node_images(const PlaneMap& map, const LipGraph& phi) {
  const int m = phi.size();
  NodeImages im;
  im.theta.resize(m + 1);
  im.radial.resize(m + 1);
  for (int i = 0; i < m; ++i) {
    const Point y = map({kTwoPi * i / m, phi.values()[i]});
    im.theta[i] = y[0];
    im.radial[i] = y[1];
  }
  im.theta[m] = im.theta[0] + kTwoPi;
  im.radial[m] = im.radial[0];
  for (int i = 0; i < m; ++i)
    if (!(im.theta[i + 1] > im.theta[i]))
      fail(ErrorKind::NotMonotone, "angle component of the graph image is not increasing");
  return im;
}

// Root of Theta(sigma) = target for sigma in [lo, hi], Theta(lo) <= target <= Theta(hi).
double pull_back(const PlaneMap& map, const LipGraph& phi, int i, double target, const NodeImages& im,
                 double* radial) {
  const int m = phi.size();
  const double h = kTwoPi / m;
  const double y0 = phi.values()[i];
  const double y1 = phi.values()[(i + 1) % m];
  auto at = [&](double w) { return map({(i + w) * h, y0 + w * (y1 - y0)}); };

  double a = 0.0, b = 1.0;
  double fa = im.theta[i] - target, fb = im.theta[i + 1] - target;
  if (fa == 0.0) {
    *radial = im.radial[i];
    return 0.0;
  }
  if (fb == 0.0) {
    *radial = im.radial[i + 1];
    return 1.0;
  }
  Point last{};
  double w = 0.0;
  int side = 0;
  // Illinois regula falsi: superlinear and always bracketed.
  for (int it = 0; it < 100; ++it) {
    w = (a * fb - b * fa) / (fb - fa);
    last = at(w);
    const double fw = last[0] - target;
    if (std::abs(fw) <= 4e-16 * (1.0 + std::abs(target)) || b - a < 1e-15) break;
    if ((fw > 0) == (fb > 0)) {
      b = w;
      fb = fw;
      if (side == 1) fa *= 0.5;
      side = 1;
    } else {
      a = w;
      fa = fw;
      if (side == -1) fb *= 0.5;
      side = -1;
    }
  }
  *radial = last[1];
  return w;
}

}  // namespace

LipGraph graph_transform(const PlaneMap& map, const LipGraph& phi) {
  const int m = phi.size();
  const NodeImages im = node_images(map, phi);
  std::vector<double> out(static_cast<size_t>(m));
  int i = 0;
  for (int j = 0; j < m; ++j) {
    double target = kTwoPi * j / m;
    // Move the target into [theta_0, theta_0 + 2 pi).
    target += kTwoPi * std::floor((im.theta[0] - target) / kTwoPi);
    while (target < im.theta[0]) target += kTwoPi;
    while (target >= im.theta[m]) target -= kTwoPi;
    if (!(im.theta[i] <= target && target <= im.theta[i + 1]))
      i = static_cast<int>(std::upper_bound(im.theta.begin(), im.theta.end(), target) - im.theta.begin()) - 1;
    i = std::clamp(i, 0, m - 1);
    double radial = 0.0;
    pull_back(map, phi, i, target, im, &radial);
    out[j] = radial;
  }
  return LipGraph(std::move(out), phi.lip_k(), phi.band());
}

LipGraph graph_transform(const Params& p, const Perturbation& pert, const LipGraph& phi, double c) {
  const GateReport g = gate(p, pert, phi.lip_k(), c);
  if (!g.admissible) fail(ErrorKind::GateRejected, "graph-transform gate rejected the parameters");
  return graph_transform(raw_map(p, pert), phi);
}

double invariance_residual(const PlaneMap& map, const LipGraph& phi) {
  double res = 0.0;
  const int m = phi.size();
  for (int i = 0; i < m; ++i) {
    const Point y = map({kTwoPi * i / m, phi.values()[i]});
    res = std::max(res, std::abs(y[1] - phi(y[0])));
  }
  return res;
}

ContractionReport measure_contraction(const Params& p, const Perturbation& pert, double k, int grid,
                                      int pairs, unsigned seed, double c) {
  ContractionReport r;
  r.analytic = contraction_bound(p, pert, k);
  const GateReport g = gate(p, pert, k, c);
  if (!g.admissible) fail(ErrorKind::GateRejected, "graph-transform gate rejected the parameters");
  const PlaneMap map = raw_map(p, pert);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_graph = [&] {
    const int mode = 1 + static_cast<int>(u(rng) * 4);
    const double amp = 0.95 * k * u(rng) / mode;
    const double offset = -0.5 + u(rng);
    const double phase = kTwoPi * u(rng);
    std::vector<double> v(static_cast<size_t>(grid));
    for (int j = 0; j < grid; ++j) v[j] = offset + amp * std::sin(mode * kTwoPi * j / grid + phase);
    return LipGraph(std::move(v), k);
  };
  for (int i = 0; i < pairs; ++i) {
    const LipGraph a = random_graph();
    const LipGraph b = random_graph();
    const LipGraph ga = graph_transform(map, a);
    const LipGraph gb = graph_transform(map, b);
    const double num = kernels::max_abs_diff(ga.values(), gb.values());
    const double den = kernels::max_abs_diff(a.values(), b.values());
    if (den > 0.0) r.ratios.push_back(num / den);
  }
  r.empirical = r.ratios.empty() ? 0.0 : *std::max_element(r.ratios.begin(), r.ratios.end());
  return r;
}

FixedPointResult iterate_graph_transform(const PlaneMap& map, LipGraph start, double C, double tol,
                                         int max_iter) {
  FixedPointResult r{std::move(start), 0.0, 0, {}};
  const double stop = tol * (1.0 - std::min(C, 1.0 - 1e-12));
  for (;;) {
    LipGraph next = graph_transform(map, r.graph);
    const double step = kernels::max_abs_diff(next.values(), r.graph.values());
    r.graph = std::move(next);
    r.steps.push_back(step);
    ++r.iterations;
    if (step <= stop) break;
    if (r.iterations >= max_iter)
      fail(ErrorKind::NoConvergence, "graph transform did not converge in " + std::to_string(max_iter) +
                                         " iterations (last step " + std::to_string(step) + ")");
  }
  r.residual = invariance_residual(map, r.graph);
  return r;
}

InvariantCircle solve_invariant_circle(const Params& p, const Perturbation& pert, const CircleOptions& opt) {
  InvariantCircle out;
  out.k = opt.k > 0.0 ? opt.k : p.eta / 6.0;
  out.gate = gate(p, pert, out.k, opt.c);
  if (!out.gate.admissible) fail(ErrorKind::GateRejected, "graph-transform gate rejected the parameters");
  out.C = contraction_bound(p, pert, out.k);
  const int budget = static_cast<int>(std::ceil(std::log(opt.tol) / std::log(out.C))) + 50;
  const PlaneMap map = raw_map(p, pert);
  out.fixed_point = iterate_graph_transform(map, LipGraph::constant(opt.grid, 0.0, out.k), out.C, opt.tol, budget);
  // The residual is limited by piecewise-linear interpolation (O(h^2)); refine
  // the grid from the current graph until it meets tol.
  int grid = opt.grid;
  while (out.fixed_point.residual > opt.tol && 2 * grid <= opt.max_grid) {
    grid *= 2;
    std::vector<double> v(static_cast<size_t>(grid));
    for (int j = 0; j < grid; ++j) v[j] = out.fixed_point.graph(kTwoPi * j / grid);
    const int done = out.fixed_point.iterations;
    out.fixed_point = iterate_graph_transform(map, LipGraph(std::move(v), out.k), out.C, opt.tol, budget);
    out.fixed_point.iterations += done;
  }
  out.unique = true;
  if (opt.multistart) {
    for (double s : {0.9, -0.9}) {
      const auto other = iterate_graph_transform(map, LipGraph::constant(grid, s, out.k), out.C, opt.tol, budget);
      out.multistart_spread = std::max(
          out.multistart_spread, kernels::max_abs_diff(other.graph.values(), out.fixed_point.graph.values()));
    }
    out.unique = out.multistart_spread <= 2.0 * opt.tol;
  }
  return out;
}

BasinReport basin_check(const Params& p, const Perturbation& pert, const LipGraph& graph, int seeds,
                        int max_iter, double within, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BasinReport r;
  r.seeds = seeds;
  for (int s = 0; s < seeds; ++s) {
    Point x{kTwoPi * u(rng), -1.0 + 2.0 * u(rng)};
    double dist = std::abs(x[1] - graph(x[0]));
    int it = 0;
    while (dist > within && it < max_iter) {
      x = eval_Q(p, pert, Frame::raw(), x);
      dist = std::abs(x[1] - graph(x[0]));
      ++it;
    }
    if (dist <= within) ++r.converged;
    r.max_iterations = std::max(r.max_iterations, it);
    r.worst_distance = std::max(r.worst_distance, dist);
  }
  return r;
}

double eta_min(const Perturbation& pert, double eps, double c) {
  auto ok = [&](double eta) {
    Params p;
    p.eta = eta;
    p.eps = eps;
    return gate(p, pert, eta / 6.0, c).admissible;
  };
  if (!ok(c)) fail(ErrorKind::NotFound, "no admissible eta below the cap");
  double lo = 0.0, hi = c;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace circle
