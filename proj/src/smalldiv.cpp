#include "circle/smalldiv.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "circle/error.hpp"

namespace circle {

DifferenceSolution solve_difference(const DifferenceProblem& p, const DifferenceOptions& opt) {
  if (p.a == 0.0 || p.b == 0.0) fail(ErrorKind::PreconditionFailed, "a and b must be nonzero");
  const int ng = p.g.cutoff();
  const int n = opt.cutoff > 0 ? opt.cutoff : std::max(2 * ng, 1);

  double tail = p.g.truncation_tail();
  for (int k = n / 2 + 1; k <= ng; ++k) tail += std::abs(p.g.coeff(k)) + std::abs(p.g.coeff(-k));
  if (tail > opt.tail_tolerance)
    fail(ErrorKind::CutoffTooSmall, "forcing has mass " + std::to_string(tail) + " above N/2");

  const double omega = kTwoPi * p.alpha.alpha;
  const int nf = std::min(n, ng);
  TrigPoly f(nf, p.g.is_real(), p.g.width());
  for (int k = -nf; k <= nf; ++k) {
    if (k == 0) continue;
    const cd d = p.a * std::polar(1.0, k * omega) - p.b;
    if (std::abs(d) < opt.min_divisor)
      fail(ErrorKind::ResonantDivisor, "divisor at k=" + std::to_string(k) + " is " +
                                           std::to_string(std::abs(d)));
    f.set_coeff(k, p.g.coeff(k) / d);
  }

  DifferenceSolution sol;
  sol.mu = p.g.mean();
  sol.f = f;
  sol.g = p.g;
  sol.gamma = p.alpha.gamma;
  sol.q = p.alpha.q;

  // Pointwise residual on a 4N grid.
  const int grid = std::max(4 * n, 64);
  const auto fs = compose_rotation(f, omega).sample_complex(grid);
  const auto f0 = f.sample_complex(grid);
  const auto gv = p.g.sample_complex(grid);
  double res = 0.0;
  for (int j = 0; j < grid; ++j) res = std::max(res, std::abs(sol.mu + p.a * fs[j] - p.b * f0[j] - gv[j]));
  sol.residual = res;
  const double limit = 1e-11 * (1.0 + p.g.norm_s(0.0));
  if (res > limit)
    fail(ErrorKind::ResidualTooLarge, "difference residual " + std::to_string(res));
  return sol;
}

LogSolution solve_log_multiplicative(const TrigPoly& B1, const DiophantineNumber& alpha) {
  const int grid = std::max(64, 8 * B1.cutoff());
  const auto v = B1.sample(grid);
  for (double x : v)
    if (!(x > 0.0)) fail(ErrorKind::NotPositive, "B1 is not strictly positive on the grid");
  const double lower = *std::min_element(v.begin(), v.end());
  const double slack = (kPi / grid) * B1.derivative().norm_s(0.0);
  if (lower - slack <= 0.0) fail(ErrorKind::NotPositive, "B1 may vanish between grid nodes");

  const TrigPoly logB = map_values(B1, [](double x) { return std::log(x); });
  // u(t + w) - u(t) = log B1 - mean, X = exp(u)
  DifferenceOptions opt;
  opt.tail_tolerance = 1e-12;
  const auto sol = solve_difference({1.0, 1.0, logB, alpha}, opt);

  LogSolution out;
  out.log_X = sol.f;
  out.beta1_bar = std::exp(sol.mu);
  out.X = map_values(sol.f, [](double x) { return std::exp(x); });
  out.X_inv = map_values(sol.f, [](double x) { return std::exp(-x); });

  const double omega = kTwoPi * alpha.alpha;
  const int rg = std::max(256, 4 * out.X.cutoff());
  const auto b = B1.sample(rg);
  const auto x = out.X.sample(rg);
  const auto xs = compose_rotation(out.X, omega).sample(rg);
  double res = 0.0;
  for (int j = 0; j < rg; ++j) res = std::max(res, std::abs(b[j] * x[j] / xs[j] - out.beta1_bar));
  out.residual = res;
  if (res > 1e-10) fail(ErrorKind::ResidualTooLarge, "multiplicative residual " + std::to_string(res));
  return out;
}

namespace {

double bound_scale(double gamma, double q, double sigma) {
  return std::pow(sigma, -(q + 1.0)) / gamma;
}

}  // namespace

NormBoundCheck check_norm_bound(const DifferenceSolution& sol, double s, double sigma) {
  if (!(s > 0.0) || !(sigma > 0.0)) fail(ErrorKind::PreconditionFailed, "s and sigma must be positive");
  NormBoundCheck c;
  c.lhs = sol.f.norm_s(s);
  c.rhs = kNormBoundConstant * bound_scale(sol.gamma, sol.q, sigma) * sol.g.norm_s(s + sigma);
  c.holds = c.lhs <= c.rhs;
  return c;
}

bool verify_norm_bound(const DifferenceSolution& sol, double s, double sigma) {
  return check_norm_bound(sol, s, sigma).holds;
}

std::vector<NormBoundProblem> norm_bound_corpus(unsigned seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const DiophantineNumber alphas[] = {certify(golden_mean(), 1.0, 2000),
                                      certify(std::sqrt(2.0) - 1.0, 1.0, 2000)};
  std::vector<NormBoundProblem> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto& alpha = alphas[i % 2];
    const int n = 4 + static_cast<int>(unit(rng) * 60);
    TrigPoly g(n);
    const bool sparse = i % 3 == 0;
    for (int k = 1; k <= n; ++k) {
      if (sparse && unit(rng) > 0.15) continue;
      g.set_coeff(k, std::polar(std::exp(-0.1 * k * unit(rng)), kTwoPi * unit(rng)));
    }
    g.set_coeff(0, unit(rng));
    NormBoundProblem p;
    p.problem = {1.0, 1.0, g, alpha};
    p.s = 0.05 + 0.45 * unit(rng);
    p.sigma = 0.05 + 0.45 * unit(rng);
    out.push_back(std::move(p));
  }
  return out;
}

double calibrate_norm_ratio(unsigned seed, int count) {
  double worst = 0.0;
  for (const auto& p : norm_bound_corpus(seed, count)) {
    const auto sol = solve_difference(p.problem);
    const double denom = bound_scale(p.problem.alpha.gamma, p.problem.alpha.q, p.sigma) * p.problem.g.norm_s(p.s + p.sigma);
    if (denom > 0.0) worst = std::max(worst, sol.f.norm_s(p.s) / denom);
  }
  return worst;
}

}  // namespace circle
