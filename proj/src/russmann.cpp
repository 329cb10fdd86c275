#include "circle/russmann.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/toms748_solve.hpp>

#include "circle/error.hpp"
#include "circle/smalldiv.hpp"

namespace circle {
namespace {

std::vector<double> grid_product(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * b[i];
  return r;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct Residual {
  std::vector<double> e1, e2;
  double sup = 0.0;
};

Residual invariance_error(const Params& p, const Perturbation& pert, const TrigPoly& per, const TrigPoly& w,
                          double lambda, int grid) {
  const double omega = kTwoPi * p.alpha.alpha;
  const auto pv = per.sample(grid);
  const auto wv = w.sample(grid);
  const auto ps = compose_rotation(per, omega).sample(grid);
  const auto ws = compose_rotation(w, omega).sample(grid);
  Residual r;
  r.e1.resize(grid);
  r.e2.resize(grid);
  for (int j = 0; j < grid; ++j) {
    const double xi = kTwoPi * j / grid;
    const Point y = eval_Q(p, pert, Frame::russ_r(), {xi + pv[j], wv[j]});
    r.e1[j] = y[0] - (xi + omega + ps[j]);
    r.e2[j] = y[1] - ws[j] - lambda;
  }
  r.sup = std::max(sup_abs(r.e1), sup_abs(r.e2));
  return r;
}

// Solution of F(t + w) - b F(t) = g including the constant mode.
std::vector<double> solve_shifted(const TrigPoly& g, double b, const DiophantineNumber& alpha, int grid) {
  DifferenceSolution s;
  try {
    s = solve_difference({1.0, b, g, alpha});
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ResonantDivisor) fail(ErrorKind::DivisorFailure, e.what());
    throw;
  }
  auto v = s.f.sample(grid);
  const double c = s.mu / (1.0 - b);
  for (double& x : v) x += c;
  return v;
}

// Fix h(0) = 0 by the reparameterization xi -> xi + s.
void renormalize(TrigPoly& per, TrigPoly& w) {
  const TrigPoly dp = per.derivative();
  double s = 0.0;
  for (int it = 0; it < 50; ++it) {
    const double step = (s + per(s)) / (1.0 + dp(s));
    s -= step;
    if (std::abs(step) < 1e-17) break;
  }
  per = compose_rotation(per, s);
  per.set_coeff(0, per.coeff(0) + s);
  w = compose_rotation(w, s);
}

TrigPoly fit(const std::vector<double>& v, int cutoff) { return TrigPoly::from_grid(v, cutoff); }

}  // namespace

double curve_defect(const Params& p, const Perturbation& pert, const TranslatedCurve& tc, int grid) {
  const double omega = kTwoPi * p.alpha.alpha;
  double d = 0.0;
  for (int j = 0; j < grid; ++j) {
    const double th = kTwoPi * j / grid;
    const Point y = eval_Q(p, pert, Frame::russ_r(), {th, tc.gamma(th)});
    const double xi = invert_lift(tc.h, th);
    const double th1 = tc.h(xi + omega);
    d = std::max({d, std::abs(y[0] - th1), std::abs(y[1] - tc.lambda - tc.gamma(th1))});
  }
  return d;
}

TranslatedCurve solve_translated_curve(const Params& p, const Perturbation& pert,
                                       const std::optional<TranslatedCurve>& guess, const RussmannOptions& opt,
                                       NewtonTrace* trace) {
  if (p.eta == 0.0) fail(ErrorKind::PreconditionFailed, "eta must be nonzero");
  if (p.eps > opt.eps0) fail(ErrorKind::PreconditionFailed, "eps exceeds the solver's plausibility bound");
  if (!(p.alpha.gamma > 0.0)) fail(ErrorKind::PreconditionFailed, "alpha is not certified");

  const int grid = opt.grid;
  const int cutoff = grid / 4;
  const double omega = kTwoPi * p.alpha.alpha;

  TrigPoly per(cutoff), w(cutoff);
  double lambda = translation_tau(p);
  if (guess) {
    per = guess->p.padded(std::max(cutoff, guess->p.cutoff())).truncated(cutoff);
    w = guess->w.padded(std::max(cutoff, guess->w.cutoff())).truncated(cutoff);
    lambda = guess->lambda;
  }

  NewtonTrace local;
  NewtonTrace& tr = trace ? *trace : local;
  tr = {};
  double best = INFINITY;
  int since_best = 0;

  for (int iter = 0;; ++iter) {
    const Residual r = invariance_error(p, pert, per, w, lambda, grid);
    tr.steps.push_back({r.sup, 0.0, 0.0, 0.0});
    if (iter == 1 && r.sup > tr.steps[0].defect && tr.steps[0].defect > opt.tol)
      fail(ErrorKind::EpsTooLarge, "first Newton step increased the defect");
    if (r.sup <= opt.tol) break;
    if (r.sup < best * 0.999) {
      best = r.sup;
      since_best = 0;
    } else if (++since_best >= opt.stagnation) {
      fail(ErrorKind::NoConvergence, "Newton defect stagnates at " + std::to_string(r.sup));
    }
    if (iter >= opt.max_iter) fail(ErrorKind::NoConvergence, "Newton iteration budget exhausted");

    // Linearization in the frame (DK, vertical).
    const auto dps = compose_rotation(per.derivative(), omega).sample(grid);
    const auto dws = compose_rotation(w.derivative(), omega).sample(grid);
    const auto pv = per.sample(grid);
    const auto wv = w.sample(grid);
    std::vector<double> c(grid), d(grid), t1(grid), t2(grid);
    for (int j = 0; j < grid; ++j) {
      const double xi = kTwoPi * j / grid;
      const Matrix2 m = jacobian_Q(p, pert, Frame::russ_r(), {xi + pv[j], wv[j]});
      const double hp = 1.0 + dps[j];
      c[j] = m[0][1] / hp;
      d[j] = m[1][1] - c[j] * dws[j];
      t1[j] = -r.e1[j] / hp;
      t2[j] = -r.e2[j] + dws[j] * r.e1[j] / hp;
    }

    // Normal component: b(xi + w) - d b(xi) = -t2 - dlambda.
    LogSolution ls;
    try {
      ls = solve_log_multiplicative(fit(d, cutoff), p.alpha);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ResonantDivisor) fail(ErrorKind::DivisorFailure, e.what());
      throw;
    }
    const auto X = ls.X.sample(grid);
    const auto Y = compose_rotation(ls.X_inv, omega).sample(grid);
    std::vector<double> g0(grid), g1(grid);
    for (int j = 0; j < grid; ++j) {
      g0[j] = -t2[j] * Y[j];
      g1[j] = -Y[j];
    }
    const auto b0 = grid_product(X, solve_shifted(fit(g0, cutoff), ls.beta1_bar, p.alpha, grid));
    const auto b1 = grid_product(X, solve_shifted(fit(g1, cutoff), ls.beta1_bar, p.alpha, grid));

    // Tangential solvability fixes the translation correction.
    double m0 = 0.0, m1 = 0.0;
    for (int j = 0; j < grid; ++j) {
      m0 += c[j] * b0[j] - t1[j];
      m1 += c[j] * b1[j];
    }
    if (std::abs(m1) < 1e-300) fail(ErrorKind::NoConvergence, "degenerate twist in the linearization");
    const double dlambda = -m0 / m1;
    std::vector<double> b(grid), ga(grid);
    for (int j = 0; j < grid; ++j) {
      b[j] = b0[j] + dlambda * b1[j];
      ga[j] = c[j] * b[j] - t1[j];
    }
    DifferenceSolution ta;
    try {
      ta = solve_difference({1.0, 1.0, fit(ga, cutoff), p.alpha});
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ResonantDivisor) fail(ErrorKind::DivisorFailure, e.what());
      throw;
    }
    const auto a = ta.f.sample(grid);
    const auto dp = per.derivative().sample(grid);
    const auto dw = w.derivative().sample(grid);
    std::vector<double> delta_p(grid), delta_w(grid);
    for (int j = 0; j < grid; ++j) {
      delta_p[j] = (1.0 + dp[j]) * a[j];
      delta_w[j] = dw[j] * a[j] + b[j];
    }
    per += fit(delta_p, cutoff);
    w += fit(delta_w, cutoff);
    lambda += dlambda;
    renormalize(per, w);
    per = per.truncated(cutoff);
    w = w.truncated(cutoff);
    auto& last = tr.steps.back();
    last.step_h = sup_abs(delta_p);
    last.step_gamma = sup_abs(delta_w);
    last.step_lambda = std::abs(dlambda);
  }

  // Quadratic tail.
  for (size_t n = 0; n + 1 < tr.steps.size(); ++n) {
    const double dn = tr.steps[n].defect, dn1 = tr.steps[n + 1].defect;
    if (dn < 1e-3 && dn > 0.0 && dn1 > 1e-13) tr.quadratic_K = std::max(tr.quadratic_K, dn1 / (dn * dn));
  }
  tr.quadratic_tail = std::isfinite(tr.quadratic_K);

  TranslatedCurve tc;
  tc.params = p;
  tc.p = per;
  tc.w = w;
  tc.lambda = lambda;
  tc.h = CircleLift(0.0, per);
  tc.iterations = static_cast<int>(tr.steps.size());
  // gamma = w o h^{-1}
  std::vector<double> gv(grid);
  for (int j = 0; j < grid; ++j) gv[j] = w(invert_lift(tc.h, kTwoPi * j / grid));
  tc.gamma = fit(gv, cutoff);
  tc.gamma_mean = tc.gamma.mean();
  tc.defect = curve_defect(p, pert, tc);
  if (tc.defect > opt.accept)
    fail(ErrorKind::NoConvergence, "translated curve defect " + std::to_string(tc.defect) + " above acceptance");
  return tc;
}

double tangential_rotation_number(const TranslatedCurve& tc, int steps) {
  const double omega = kTwoPi * tc.params.alpha.alpha;
  std::vector<double> orbit(static_cast<size_t>(steps));
  for (int n = 0; n < steps; ++n) orbit[n] = tc.h(n * omega);
  return rotation_number(orbit).value;
}

double orbit_rotation_number(const Params& p, const Perturbation& pert, const TranslatedCurve& tc, int steps) {
  std::vector<double> orbit(static_cast<size_t>(steps));
  Point x{0.0, tc.gamma(0.0)};
  for (int n = 0; n < steps; ++n) {
    orbit[n] = x[0];
    x = eval_Q(p, pert, Frame::russ_r(), x);
  }
  return rotation_number(orbit).value;
}

double dlambda_dnu(const Params& p, const Perturbation& pert, double delta, const RussmannOptions& opt) {
  Params a = p, b = p;
  a.nu += delta;
  b.nu -= delta;
  const auto ta = solve_translated_curve(a, pert, std::nullopt, opt);
  const auto tb = solve_translated_curve(b, pert, ta, opt);
  return (ta.lambda - tb.lambda) / (2.0 * delta);
}

CAlphaResult find_c_alpha(const Params& p0, const Perturbation& pert, double nu_lo, double nu_hi,
                          const RussmannOptions& opt, const std::optional<TranslatedCurve>& guess) {
  if (p0.eta < 4.0 * pert.C2_bound * p0.eps / kPi)
    fail(ErrorKind::PreconditionFailed, "eta below the 4 M eps / pi threshold");
  CAlphaResult out;
  std::optional<TranslatedCurve> warm = guess;
  auto solve_at = [&](double nu) {
    Params p = p0;
    p.nu = nu;
    auto tc = solve_translated_curve(p, pert, warm, opt);
    warm = tc;
    ++out.evaluations;
    return tc;
  };
  auto lo = solve_at(nu_lo);
  auto hi = solve_at(nu_hi);
  if (lo.lambda == 0.0) {
    out.nu_star = nu_lo;
    out.curve = lo;
  } else if (hi.lambda == 0.0) {
    out.nu_star = nu_hi;
    out.curve = hi;
  } else {
    if ((lo.lambda > 0) == (hi.lambda > 0)) fail(ErrorKind::NoSignChange, "lambda has one sign on the bracket");
    TranslatedCurve best = std::abs(lo.lambda) < std::abs(hi.lambda) ? lo : hi;
    double best_nu = std::abs(lo.lambda) < std::abs(hi.lambda) ? nu_lo : nu_hi;
    auto f = [&](double nu) {
      auto tc = solve_at(nu);
      if (std::abs(tc.lambda) < std::abs(best.lambda)) {
        best = tc;
        best_nu = nu;
      }
      return tc.lambda;
    };
    auto stop = [&](double a, double b) {
      return std::abs(best.lambda) <= 1e-13 || std::abs(b - a) <= 4e-16 * std::max(1.0, std::abs(a));
    };
    std::uintmax_t max_iter = 60;
    boost::math::tools::toms748_solve(f, nu_lo, nu_hi, lo.lambda, hi.lambda, stop, max_iter);
    out.nu_star = best_nu;
    out.curve = best;
  }
  if (std::abs(out.curve.lambda) > 1e-11)
    fail(ErrorKind::NoConvergence, "C_alpha root not resolved: |lambda| = " + std::to_string(std::abs(out.curve.lambda)));
  out.K = p0.eps > 0.0 ? std::abs(out.nu_star - p0.alpha.alpha) / p0.eps : 0.0;
  return out;
}

}  // namespace circle
