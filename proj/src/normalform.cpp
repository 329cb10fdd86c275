#include "circle/normalform.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "circle/error.hpp"
#include "circle/jet.hpp"
#include "circle/smalldiv.hpp"

namespace circle {
namespace {

struct NodeJets {
  Jet angle;   // xi' - xi - omega
  Jet radial;  // x'
};

struct Coefficients {
  std::vector<TrigPoly> A, B;
};

Coefficients fit_nodes(const std::vector<NodeJets>& nodes, int order) {
  const int grid = static_cast<int>(nodes.size());
  const int cutoff = grid / 2 - 1;
  Coefficients c;
  std::vector<double> va(grid), vb(grid);
  for (int m = 0; m <= order; ++m) {
    for (int j = 0; j < grid; ++j) {
      va[j] = nodes[j].angle[m];
      vb[j] = nodes[j].radial[m];
    }
    c.A.push_back(TrigPoly::from_grid(va, cutoff));
    c.B.push_back(TrigPoly::from_grid(vb, cutoff));
  }
  return c;
}

// sum_m coeff_m(at) y^m by Horner; `at` constant means plain node values.
Jet apply_series(const std::vector<TrigPoly>& coeff, const std::vector<std::vector<double>>& node_values, int j,
                 const Jet& at, const Jet& y, bool constant_angle) {
  // coeff is expected denoised when the angle is not constant.
  const int n = y.order();
  Jet acc(n);
  for (int m = static_cast<int>(node_values.size()) - 1; m >= 0; --m) {
    acc = acc * y;
    if (constant_angle) acc[0] += node_values[m][j];
    else acc += compose_trig(coeff[m], at);
  }
  return acc;
}

std::vector<std::vector<double>> sample_all(const std::vector<TrigPoly>& c, int grid) {
  std::vector<std::vector<double>> v;
  for (const auto& t : c) v.push_back(t.sample(grid));
  return v;
}

// Coefficients of Phi o Q o Phi^{-1} at the grid nodes.
Coefficients conjugate(const Coefficients& q, const CoordChange& ch, double omega, int grid, int order) {
  const auto sa = sample_all(q.A, grid);
  const auto sb = sample_all(q.B, grid);
  std::vector<TrigPoly> qa, qb;
  if (ch.kind == ChangeKind::Angular) {
    for (const auto& t : q.A) qa.push_back(t.denoised());
    for (const auto& t : q.B) qb.push_back(t.denoised());
  }
  const auto fv = ch.fn.sample(grid);
  std::vector<NodeJets> nodes(grid);
  for (int j = 0; j < grid; ++j) {
    const double xi = kTwoPi * j / grid;
    Jet s(order);
    s[1] = 1.0;
    // Phi^{-1} at (xi, s) as jets.
    Jet at = Jet::constant(xi, order);
    Jet y = s;
    bool constant_angle = true;
    switch (ch.kind) {
      case ChangeKind::LogScale:
        y = s * fv[j];
        break;
      case ChangeKind::Radial: {
        Jet fwd = s;
        fwd[ch.order] += fv[j];
        y = revert(fwd);
        break;
      }
      case ChangeKind::Angular: {
        const Jet si = power(s, ch.order);
        Jet delta(order);
        for (int it = 0; it <= order / ch.order + 1; ++it)
          delta = compose_trig(ch.fn, delta + xi) * si * -1.0;
        at = delta + xi;
        constant_angle = false;
        break;
      }
    }
    // Old map.
    Jet ang = apply_series(qa, sa, j, at, y, constant_angle) + at;
    ang[0] += omega;
    Jet rad = apply_series(qb, sb, j, at, y, constant_angle);
    // Phi forward.
    switch (ch.kind) {
      case ChangeKind::LogScale:
        rad = rad * compose_trig(ch.fn_inv, ang);
        break;
      case ChangeKind::Radial:
        rad += compose_trig(ch.fn, ang) * power(rad, ch.order);
        break;
      case ChangeKind::Angular:
        ang += compose_trig(ch.fn, ang) * power(rad, ch.order);
        break;
    }
    ang[0] -= xi + omega;
    nodes[j] = {ang, rad};
  }
  return fit_nodes(nodes, order);
}

double nonconstancy(const TrigPoly& t) { return t.oscillation_norm(); }

// Exact Q in the (xi, x) chart of a translated curve.
Point local_map(const Params& p, const Perturbation& pert, const TranslatedCurve& tc, const Point& z) {
  const Point y = eval_Q(p, pert, Frame::russ_r(), {tc.h(z[0]), z[1] + tc.w(z[0])});
  const double xi = invert_lift(tc.h, y[0]);
  return {xi, y[1] - tc.w(xi)};
}

}  // namespace

LocalizedMap localize(const Params& p, const Perturbation& pert, const TranslatedCurve& tc,
                      const LocalizeOptions& opt) {
  const int order = opt.k_max + opt.extra_orders;
  const int grid = opt.grid;
  const double omega = kTwoPi * p.alpha.alpha;
  const double C = twist(p), e = contraction_factor(p), tau = translation_tau(p), off = russ_offset(p);
  const TrigPoly per = tc.p.denoised();
  const TrigPoly wc = tc.w.denoised();
  std::vector<NodeJets> nodes(grid);
  for (int j = 0; j < grid; ++j) {
    const double xi = kTwoPi * j / grid;
    const double th = tc.h(xi);
    const double w0 = tc.w(xi);
    // Image of (h(xi), w(xi) + s) as polynomials in s.
    Jet th1(order), r1(order);
    th1[0] = th + omega + C * w0;
    th1[1] = C;
    r1[0] = e * w0 + tau;
    r1[1] = e;
    if (p.eps != 0.0) {
      const double rho0 = w0 - off;
      if (!pert.f.empty()) {
        const auto fc = pert.f.taylor_in_rho(th, rho0);
        for (int m = 0; m < static_cast<int>(fc.size()) && m <= order; ++m) th1[m] += p.eps * fc[m];
      }
      if (!pert.g.empty()) {
        const auto gc = pert.g.taylor_in_rho(th, rho0);
        for (int m = 0; m < static_cast<int>(gc.size()) && m <= order; ++m) r1[m] += p.eps * gc[m];
      }
    }
    // xi' = h^{-1}(th1) by series reversion of h around its preimage.
    const double xi0 = invert_lift(tc.h, th1[0]);
    auto hs = trig_taylor(per, xi0, order);
    hs[0] = 0.0;
    hs[1] += 1.0;
    const Jet hinv = revert(Jet(hs));
    Jet xi1 = compose(hinv.coeffs(), th1.without_constant()) + xi0;
    Jet x1 = r1 - compose_trig(wc, xi1);
    Jet ang = xi1;
    ang[0] -= xi + omega;
    nodes[j] = {ang, x1};
  }
  const Coefficients c = fit_nodes(nodes, order);

  LocalizedMap lm;
  lm.A = c.A;
  lm.B = c.B;
  lm.lambda = tc.lambda;
  lm.k_max = opt.k_max;
  lm.order = order;
  lm.omega = omega;
  lm.params = p;
  lm.curve = tc;
  lm.tail_bound = 2.0 * (c.A[order].sup_norm() + c.B[order].sup_norm()) * std::pow(0.1, order);

  // Finite differences in x at 64 angles.
  constexpr double dx = 1e-4;
  for (int j = 0; j < 64; ++j) {
    const double xi = kTwoPi * (j + 0.5) / 64;
    const Point plus = local_map(p, pert, tc, {xi, dx});
    const Point minus = local_map(p, pert, tc, {xi, -dx});
    const double a1 = (plus[0] - minus[0]) / (2 * dx);
    const double b1 = (plus[1] - minus[1]) / (2 * dx);
    const double ja = lm.A[1](xi), jb = lm.B[1](xi);
    if (std::abs(a1 - ja) > opt.fd_tolerance * (1.0 + std::abs(ja)) ||
        std::abs(b1 - jb) > opt.fd_tolerance * (1.0 + std::abs(jb)))
      fail(ErrorKind::TaylorUnstable, "localized coefficients disagree with finite differences");
  }
  return lm;
}

Point CoordChange::forward(const Point& pt) const {
  switch (kind) {
    case ChangeKind::LogScale: return {pt[0], pt[1] * fn_inv(pt[0])};
    case ChangeKind::Radial: return {pt[0], pt[1] + fn(pt[0]) * std::pow(pt[1], order)};
    case ChangeKind::Angular: return {pt[0] + fn(pt[0]) * std::pow(pt[1], order), pt[1]};
  }
  return pt;
}

Point CoordChange::inverse(const Point& pt) const {
  switch (kind) {
    case ChangeKind::LogScale: return {pt[0], pt[1] * fn(pt[0])};
    case ChangeKind::Radial: {
      const double c = fn(pt[0]);
      double y = pt[1];
      for (int it = 0; it < 60; ++it) {
        const double r = y + c * std::pow(y, order) - pt[1];
        const double step = r / (1.0 + order * c * std::pow(y, order - 1));
        y -= step;
        if (std::abs(step) <= 2e-16 * (1.0 + std::abs(y))) return {pt[0], y};
      }
      if (std::abs(y + c * std::pow(y, order) - pt[1]) <= 1e-14) return {pt[0], y};
      fail(ErrorKind::NoConvergence, "radial change inversion");
    }
    case ChangeKind::Angular: {
      const double yi = std::pow(pt[1], order);
      double xi = pt[0];
      for (int it = 0; it < 60; ++it) {
        const double r = xi + fn(xi) * yi - pt[0];
        const double step = r / (1.0 + dfn(xi) * yi);
        xi -= step;
        if (std::abs(step) <= 4e-16 * (1.0 + std::abs(xi))) return {xi, pt[1]};
      }
      if (std::abs(xi + fn(xi) * yi - pt[0]) <= 1e-13) return {xi, pt[1]};
      fail(ErrorKind::NoConvergence, "angular change inversion");
    }
  }
  return pt;
}

NormalFormResult reduce(const LocalizedMap& lm, const DiophantineNumber& alpha, int k, const ReduceOptions& opt) {
  if (k < 1 || k > lm.k_max) fail(ErrorKind::PreconditionFailed, "reduction order outside 1..k_max");
  const int grid = 2 * (lm.A[0].cutoff() + 1);
  const int order = lm.order;
  const double omega = lm.omega;
  NormalFormResult nf;
  nf.k = k;
  nf.alpha_bar.assign(k + 1, 0.0);
  nf.beta_bar.assign(k + 1, 0.0);
  Coefficients q{lm.A, lm.B};
  const double lam_scale = std::abs(lm.lambda);

  auto targeted_ok = [&](const TrigPoly& t, const TrigPoly& fn) {
    return nonconstancy(t) <= opt.targeted_tolerance + 10.0 * lam_scale * (1.0 + fn.norm_s(0.0));
  };
  auto check_blowup = [&](const TrigPoly& fn) {
    if (fn.norm_s(0.0) > opt.blowup) fail(ErrorKind::OrderBlowup, "coordinate change left the perturbative regime");
  };

  // (1) x -> x / X with B_1 X / X(. + w) = beta_bar_1.
  const LogSolution ls = solve_log_multiplicative(q.B[1], alpha);
  nf.log_beta1 = ls.beta1_bar;
  nf.beta_bar[1] = ls.beta1_bar;
  {
    CoordChange ch;
    ch.kind = ChangeKind::LogScale;
    ch.order = 1;
    ch.fn = ls.X.denoised();
    ch.fn_inv = ls.X_inv.denoised();
    ch.dfn = ch.fn.derivative();
    check_blowup(ch.fn);
    q = conjugate(q, ch, omega, grid, order);
    if (!targeted_ok(q.B[1], ch.fn)) fail(ErrorKind::ResidualTooLarge, "order-1 radial term not constant after rescaling");
    nf.transform_stack.push_back(ch);
  }
  const double b1 = nf.beta_bar[1];

  // (2) radial orders: b1^i X(xi + w) - b1 X(xi) + beta_i = beta_bar_i.
  for (int i = 2; i <= k; ++i) {
    const auto sol = solve_difference({std::pow(b1, i), b1, -q.B[i], alpha});
    CoordChange ch;
    ch.kind = ChangeKind::Radial;
    ch.order = i;
    ch.fn = sol.f.denoised();
    ch.dfn = ch.fn.derivative();
    check_blowup(ch.fn);
    q = conjugate(q, ch, omega, grid, order);
    if (!targeted_ok(q.B[i], ch.fn))
      fail(ErrorKind::ResidualTooLarge, "radial order " + std::to_string(i) + " not constant after elimination");
    nf.beta_bar[i] = q.B[i].mean();
    nf.transform_stack.push_back(ch);
  }

  // (3) angular orders: b1^i Z(xi + w) - Z(xi) + alpha_i = alpha_bar_i.
  for (int i = 1; i <= k; ++i) {
    const auto sol = solve_difference({std::pow(b1, i), 1.0, -q.A[i], alpha});
    CoordChange ch;
    ch.kind = ChangeKind::Angular;
    ch.order = i;
    ch.fn = sol.f.denoised();
    ch.dfn = ch.fn.derivative();
    check_blowup(ch.fn);
    q = conjugate(q, ch, omega, grid, order);
    if (!targeted_ok(q.A[i], ch.fn))
      fail(ErrorKind::ResidualTooLarge, "angular order " + std::to_string(i) + " not constant after elimination");
    nf.alpha_bar[i] = q.A[i].mean();
    nf.transform_stack.push_back(ch);
  }

  nf.lambda = q.B[0].mean();
  for (int i = 0; i <= k; ++i) {
    nf.residual_angular.push_back(nonconstancy(q.A[i]));
    nf.residual_radial.push_back(nonconstancy(q.B[i]));
    if (i >= 1) nf.max_residual = std::max({nf.max_residual, nf.residual_angular[i], nf.residual_radial[i]});
  }
  nf.reduced = lm;
  nf.reduced.A = q.A;
  nf.reduced.B = q.B;
  nf.reduced.lambda = nf.lambda;
  return nf;
}

NormalFormTransform::NormalFormTransform(const Params& p, const TranslatedCurve& tc, std::vector<CoordChange> stack)
    : params_(p), h_(tc.h), w_(tc.w), stack_(std::move(stack)) {}

Point NormalFormTransform::to_local(const Point& russ) const {
  const double xi = invert_lift(h_, russ[0]);
  Point z{xi, russ[1] - w_(xi)};
  for (const auto& ch : stack_) z = ch.forward(z);
  return z;
}

Point NormalFormTransform::from_local(const Point& local) const {
  Point z = local;
  for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) z = it->inverse(z);
  return {h_(z[0]), z[1] + w_(z[0])};
}

Point NormalFormTransform::raw_to_normal(const Point& raw) const {
  return to_local({raw[0], raw[1] + russ_offset(params_)});
}

Point NormalFormTransform::normal_to_raw(const Point& nf) const {
  const Point r = from_local(nf);
  return {r[0], r[1] - russ_offset(params_)};
}

Frame normal_frame(const Params& p, const TranslatedCurve& tc, const NormalFormResult& nf) {
  return {FrameTag::NormalThetaR, std::make_shared<NormalFormTransform>(p, tc, nf.transform_stack)};
}

Frame curve_frame(const Params& p, const TranslatedCurve& tc) {
  return {FrameTag::RussXiX, std::make_shared<NormalFormTransform>(p, tc, std::vector<CoordChange>{})};
}

Point eval_reduced(const NormalFormResult& nf, const Point& pt) {
  const auto& A = nf.reduced.A;
  const auto& B = nf.reduced.B;
  double a = 0.0, b = 0.0;
  for (int m = static_cast<int>(A.size()) - 1; m >= 0; --m) {
    a = a * pt[1] + A[m](pt[0]);
    b = b * pt[1] + B[m](pt[0]);
  }
  return {pt[0] + nf.reduced.omega + a, b};
}

double roundtrip_error(const Params& p, const TranslatedCurve& tc, const NormalFormResult& nf, int count,
                       double y_max, unsigned seed) {
  const NormalFormTransform t(p, tc, nf.transform_stack);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const Point z{kTwoPi * u(rng), y_max * (2.0 * u(rng) - 1.0)};
    const Point raw = t.normal_to_raw(z);
    const Point back = t.raw_to_normal(raw);
    const Point again = t.normal_to_raw(back);
    worst = std::max({worst, std::abs(back[0] - z[0]), std::abs(back[1] - z[1]), std::abs(again[0] - raw[0]),
                      std::abs(again[1] - raw[1])});
  }
  return worst;
}

double commutation_error(const Params& p, const Perturbation& pert, const TranslatedCurve& tc,
                         const NormalFormResult& nf, int count, double y_max, unsigned seed) {
  const NormalFormTransform t(p, tc, nf.transform_stack);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const Point z{kTwoPi * u(rng), y_max * (2.0 * u(rng) - 1.0)};
    const Point lhs = t.raw_to_normal(eval_Q(p, pert, Frame::raw(), t.normal_to_raw(z)));
    const Point rhs = eval_reduced(nf, z);
    worst = std::max({worst, std::abs(lhs[0] - rhs[0]), std::abs(lhs[1] - rhs[1])});
  }
  return worst;
}

double invariant_radius(const NormalFormResult& nf) {
  const double b1 = nf.beta_bar[1];
  if (!(std::abs(b1 - 1.0) > 1e-8)) fail(ErrorKind::PreconditionFailed, "beta_bar_1 too close to 1");
  // F(R) = lambda + sum beta_i R^i - R and F'(R) + 1
  auto poly = [&](double R, double* d) {
    double v = 0.0, dv = 0.0;
    for (int i = nf.k; i >= 1; --i) {
      v = v * R + nf.beta_bar[i];
      dv = dv * R + i * nf.beta_bar[i];
    }
    *d = dv;
    return nf.lambda + v * R - R;
  };
  double R = -nf.lambda / (b1 - 1.0);
  for (int it = 0; it < 100; ++it) {
    double d = 0.0;
    const double f = poly(R, &d);
    const double step = f / (d - 1.0);
    R -= step;
    if (!(std::abs(R) <= 1.0)) fail(ErrorKind::NoRoot, "invariant radius left |R| <= 1");
    if (std::abs(step) <= 1e-17 + 1e-16 * std::abs(R)) {
      double dd = 0.0;
      if (std::abs(poly(R, &dd)) <= 1e-13) return R;
    }
  }
  fail(ErrorKind::NoRoot, "invariant radius Newton did not converge");
}

double radial_multiplier(const NormalFormResult& nf, double R0) {
  double d = 0.0;
  for (int i = nf.k; i >= 1; --i) d = d * R0 + i * nf.beta_bar[i];
  return d;
}

const char* to_string(RegionTag tag) {
  switch (tag) {
    case RegionTag::Thm1: return "thm1_region";
    case RegionTag::Thm2: return "thm2_region";
    case RegionTag::OnCAlpha: return "on_c_alpha";
    case RegionTag::Unresolved: return "unresolved";
  }
  return "?";
}

double default_c2(const Perturbation& pert) { return 10.0 * (pert.A + pert.C2_bound); }

RegionReport classify_region(const Params& p, const Perturbation& pert, const RegionOptions& opt) {
  RegionReport r;
  r.nu = p.nu;
  r.eta = p.eta;
  r.eps = p.eps;
  r.c2 = opt.c2 > 0.0 ? opt.c2 : default_c2(pert);
  if (p.eta > 0.0) r.gate_admissible = gate(p, pert, p.eta / 6.0, opt.c).admissible;
  r.thm2_eps = p.eta >= r.c2 * p.eps;
  r.thm2_nu = p.eta >= std::sqrt(kTwoPi) * std::abs(p.nu - p.alpha.alpha);
  if (opt.solve_lambda && p.eta > 0.0) {
    try {
      const auto tc = solve_translated_curve(p, pert, std::nullopt, opt.russmann);
      r.lambda = tc.lambda;
      r.residual = tc.defect;
    } catch (const Error& e) {
      r.error = e.what();
    }
  }
  if (r.gate_admissible) r.tag = RegionTag::Thm1;
  else if (r.lambda && std::abs(*r.lambda) <= 1e-11) r.tag = RegionTag::OnCAlpha;
  else if (r.thm2_eps && r.thm2_nu) r.tag = RegionTag::Thm2;
  else r.tag = RegionTag::Unresolved;
  return r;
}

CircleVerification verify_circle_in_region(const Params& p, const Perturbation& pert, const TranslatedCurve& tc,
                                           const NormalFormResult& nf, const VerifyOptions& opt) {
  const RegionReport region = classify_region(p, pert, opt.region);
  if (!(region.thm2_eps && region.thm2_nu) && region.tag != RegionTag::Thm1)
    fail(ErrorKind::PreconditionFailed, "parameters are outside the normal-form region");
  const auto t = std::make_shared<NormalFormTransform>(p, tc, nf.transform_stack);
  CircleVerification out;
  out.band = opt.band;
  out.R0 = invariant_radius(nf);
  out.multiplier = radial_multiplier(nf, out.R0);
  const double R0 = out.R0, s = opt.band;
  const PlaneMap map = [&](const Point& z) {
    const Point raw = t->normal_to_raw({z[0], R0 + s * z[1]});
    const Point img = t->raw_to_normal(eval_Q(p, pert, Frame::raw(), raw));
    return Point{img[0], (img[1] - R0) / s};
  };
  const double C = std::min(std::abs(out.multiplier), 1.0 - 1e-6);
  const auto fp = iterate_graph_transform(map, LipGraph::constant(opt.grid, 0.0, opt.k), C, opt.tol, opt.max_iter);
  out.graph = fp.graph;
  out.iterations = fp.iterations;

  // Residual in raw coordinates: image of each circle point against the circle
  // point with the same normal angle.
  const int m = opt.grid;
  double res = 0.0, agree = 0.0;
  for (int j = 0; j < m; ++j) {
    const double th = kTwoPi * j / m;
    const Point raw = t->normal_to_raw({th, R0 + s * fp.graph.values()[j]});
    const Point img = eval_Q(p, pert, Frame::raw(), raw);
    const Point zn = t->raw_to_normal(img);
    const Point on = t->normal_to_raw({zn[0], R0 + s * fp.graph(zn[0])});
    res = std::max({res, std::abs(on[0] - img[0]), std::abs(on[1] - img[1])});
    agree = std::max(agree, std::abs(raw[1] + russ_offset(p) - tc.gamma(raw[0])));
  }
  out.residual = res;
  if (std::abs(tc.lambda) <= 1e-11) out.curve_agreement = agree;
  return out;
}

}  // namespace circle
