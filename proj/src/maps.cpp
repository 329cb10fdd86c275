#include "circle/maps.hpp"

#include <algorithm>
#include <cmath>

#include "circle/error.hpp"

namespace circle {

BivariateTable::BivariateTable(std::vector<TrigPoly> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    dterms_.push_back(t.derivative());
    ddterms_.push_back(t.derivative(2));
  }
}

double BivariateTable::value(double theta, double rho) const {
  double acc = 0.0;
  for (int j = degree(); j >= 0; --j) acc = acc * rho + terms_[j](theta);
  return acc;
}

double BivariateTable::d_theta(double theta, double rho) const {
  double acc = 0.0;
  for (int j = degree(); j >= 0; --j) acc = acc * rho + dterms_[j](theta);
  return acc;
}

double BivariateTable::d_rho(double theta, double rho) const {
  double acc = 0.0;
  for (int j = degree(); j >= 1; --j) acc = acc * rho + j * terms_[j](theta);
  return acc;
}

std::array<double, 3> BivariateTable::value_and_gradient(double theta, double rho) const {
  double v = 0.0, dt = 0.0, dr = 0.0;
  for (int j = degree(); j >= 0; --j) {
    const double c = terms_[j](theta);
    dr = dr * rho + v;
    v = v * rho + c;
    dt = dt * rho + dterms_[j](theta);
  }
  return {v, dt, dr};
}

std::array<double, 3> BivariateTable::hessian(double theta, double rho) const {
  double tt = 0.0, tr = 0.0, rr = 0.0;
  for (int j = degree(); j >= 0; --j) {
    const double rp = std::pow(rho, j);
    tt += ddterms_[j](theta) * rp;
    if (j >= 1) tr += j * dterms_[j](theta) * std::pow(rho, j - 1);
    if (j >= 2) rr += j * (j - 1) * terms_[j](theta) * std::pow(rho, j - 2);
  }
  return {tt, tr, rr};
}

std::vector<double> BivariateTable::taylor_in_rho(double theta, double rho0) const {
  // Horner-style shift of the polynomial in rho to the base point rho0.
  std::vector<double> c(terms_.size());
  for (size_t j = 0; j < terms_.size(); ++j) c[j] = terms_[j](theta);
  const int n = degree();
  for (int i = 0; i < n; ++i)
    for (int j = n - 1; j >= i; --j) c[j] += rho0 * c[j + 1];
  return c;
}

DerivativeBounds derivative_bounds(const BivariateTable& t) {
  DerivativeBounds b;
  if (t.empty()) return b;
  constexpr int kAngles = 512;
  constexpr int kRadii = 65;
  double st = 0.0, sr = 0.0, s2 = 0.0;
  for (int i = 0; i < kAngles; ++i) {
    const double th = kTwoPi * i / kAngles;
    for (int j = 0; j < kRadii; ++j) {
      const double rho = -1.0 + 2.0 * j / (kRadii - 1);
      const auto g = t.value_and_gradient(th, rho);
      st = std::max(st, std::abs(g[1]));
      sr = std::max(sr, std::abs(g[2]));
      const auto h = t.hessian(th, rho);
      s2 = std::max({s2, std::abs(h[0]), std::abs(h[1]), std::abs(h[2])});
    }
  }
  b.first = 1.05 * std::max(st, sr);
  b.second = 1.05 * s2;
  return b;
}

Perturbation Perturbation::make(std::vector<TrigPoly> f_terms, std::vector<TrigPoly> g_terms) {
  Perturbation p;
  p.f = BivariateTable(std::move(f_terms));
  p.g = BivariateTable(std::move(g_terms));
  const auto bf = derivative_bounds(p.f);
  const auto bg = derivative_bounds(p.g);
  p.A_f = bf.first;
  p.A_g = bg.first;
  p.A = p.A_f + p.A_g;
  p.C2_bound = std::max(bf.second, bg.second);
  return p;
}

Perturbation Perturbation::sin_cos(double amplitude) {
  return make({TrigPoly::sin_mode(1, amplitude)}, {TrigPoly::cos_mode(1, amplitude)});
}

namespace {

nlohmann::json table_json(const BivariateTable& t) {
  auto arr = nlohmann::json::array();
  for (int j = 0; j <= t.degree(); ++j) {
    nlohmann::json term;
    to_json(term, t.terms()[j]);
    arr.push_back({j, term});
  }
  return arr;
}

std::vector<TrigPoly> table_terms(const nlohmann::json& arr) {
  std::vector<TrigPoly> terms;
  for (const auto& entry : arr) {
    if (!entry.is_array() || entry.size() != 2) fail(ErrorKind::ParseError, "perturbation term must be [j, trigpoly]");
    const int j = entry[0].get<int>();
    if (j < 0 || j > 64) fail(ErrorKind::ParseError, "perturbation power out of range");
    TrigPoly t;
    from_json(entry[1], t);
    if (static_cast<int>(terms.size()) <= j) terms.resize(j + 1, TrigPoly(0));
    terms[j] = terms[j] + t;
  }
  return terms;
}

}  // namespace

void to_json(nlohmann::json& j, const Perturbation& p) {
  j = {{"f", table_json(p.f)}, {"g", table_json(p.g)}};
}

void from_json(const nlohmann::json& j, Perturbation& p) {
  p = Perturbation::make(table_terms(j.at("f")), table_terms(j.at("g")));
}

const char* to_string(FrameTag tag) {
  switch (tag) {
    case FrameTag::Raw: return "raw";
    case FrameTag::DioShift: return "dio_shift";
    case FrameTag::RussR: return "russ_r";
    case FrameTag::RussXiX: return "russ_xi_x";
    case FrameTag::NormalThetaR: return "normal_ThetaR";
  }
  return "?";
}

double contraction_factor(const Params& p) { return std::exp(-kTwoPi * p.eta); }

double twist(const Params& p) { return -std::expm1(-kTwoPi * p.eta) / p.eta; }

double translation_tau(const Params& p) { return kTwoPi * p.eta * (p.nu - p.alpha.alpha); }

double radius_r_alpha(const Params& p) {
  return (p.nu - p.alpha.alpha) * (1.0 + kTwoPi * p.eta / std::expm1(-kTwoPi * p.eta));
}

double russ_offset(const Params& p) {
  // r = rho - tau / (e - 1)
  return -translation_tau(p) / std::expm1(-kTwoPi * p.eta);
}

namespace {

void require_eta(const Params& p) {
  if (p.eta == 0.0) fail(ErrorKind::PreconditionFailed, "eta must be nonzero");
}

double radial_offset(const Params& p, FrameTag tag) {
  switch (tag) {
    case FrameTag::Raw: return 0.0;
    case FrameTag::DioShift: return p.nu - p.alpha.alpha;
    default: return russ_offset(p);
  }
}

}  // namespace

Point to_frame(const Params& p, const Frame& frame, const Point& raw) {
  require_eta(p);
  Point q{raw[0], raw[1] + radial_offset(p, frame.tag)};
  if (frame.tag == FrameTag::RussXiX || frame.tag == FrameTag::NormalThetaR) {
    if (!frame.transform) fail(ErrorKind::PreconditionFailed, "frame has no transform");
    q = frame.transform->to_local(q);
  }
  return q;
}

Point from_frame(const Params& p, const Frame& frame, const Point& local) {
  require_eta(p);
  Point q = local;
  if (frame.tag == FrameTag::RussXiX || frame.tag == FrameTag::NormalThetaR) {
    if (!frame.transform) fail(ErrorKind::PreconditionFailed, "frame has no transform");
    q = frame.transform->from_local(q);
  }
  return {q[0], q[1] - radial_offset(p, frame.tag)};
}

namespace {

Point raw_P(const Params& p, const Point& x) {
  return {x[0] + kTwoPi * p.nu + twist(p) * x[1], x[1] * contraction_factor(p)};
}

Point raw_Q(const Params& p, const Perturbation& pert, const Point& x, double band) {
  if (!(std::abs(x[1]) <= band)) fail(ErrorKind::OutOfDomain, "radius outside the validity band");
  Point y = raw_P(p, x);
  if (p.eps != 0.0) {
    if (!pert.f.empty()) y[0] += p.eps * pert.f.value(x[0], x[1]);
    if (!pert.g.empty()) y[1] += p.eps * pert.g.value(x[0], x[1]);
  }
  return y;
}

bool shifted_chart(FrameTag tag) {
  return tag == FrameTag::Raw || tag == FrameTag::DioShift || tag == FrameTag::RussR;
}

}  // namespace

Point eval_P(const Params& p, const Frame& frame, const Point& pt) {
  if (frame.tag == FrameTag::RussR) {
    require_eta(p);
    // Closed form: (theta + 2 pi alpha + C r, e r + tau)
    return {pt[0] + kTwoPi * p.alpha.alpha + twist(p) * pt[1],
            contraction_factor(p) * pt[1] + translation_tau(p)};
  }
  return to_frame(p, frame, raw_P(p, from_frame(p, frame, pt)));
}

Point eval_Q(const Params& p, const Perturbation& pert, const Frame& frame, const Point& pt,
             double band) {
  return to_frame(p, frame, raw_Q(p, pert, from_frame(p, frame, pt), band));
}

Matrix2 jacobian_Q(const Params& p, const Perturbation& pert, const Frame& frame, const Point& pt,
                   double band) {
  if (shifted_chart(frame.tag)) {
    const Point x = from_frame(p, frame, pt);
    if (!(std::abs(x[1]) <= band)) fail(ErrorKind::OutOfDomain, "radius outside the validity band");
    Matrix2 m{{{1.0, twist(p)}, {0.0, contraction_factor(p)}}};
    if (p.eps != 0.0) {
      if (!pert.f.empty()) {
        const auto gf = pert.f.value_and_gradient(x[0], x[1]);
        m[0][0] += p.eps * gf[1];
        m[0][1] += p.eps * gf[2];
      }
      if (!pert.g.empty()) {
        const auto gg = pert.g.value_and_gradient(x[0], x[1]);
        m[1][0] += p.eps * gg[1];
        m[1][1] += p.eps * gg[2];
      }
    }
    return m;
  }
  // Transformed charts: central differences through the exact conjugation.
  constexpr double h = 1e-6;
  Matrix2 m{};
  for (int c = 0; c < 2; ++c) {
    Point a = pt, b = pt;
    a[c] += h;
    b[c] -= h;
    const Point fa = eval_Q(p, pert, frame, a, band);
    const Point fb = eval_Q(p, pert, frame, b, band);
    for (int r = 0; r < 2; ++r) m[r][c] = (fa[r] - fb[r]) / (2 * h);
  }
  return m;
}

std::vector<Point> orbit(const Params& p, const Perturbation& pert, const Frame& frame,
                         const Point& start, int steps, double band) {
  std::vector<Point> out;
  out.reserve(static_cast<size_t>(steps) + 1);
  out.push_back(start);
  for (int i = 0; i < steps; ++i) out.push_back(eval_Q(p, pert, frame, out.back(), band));
  return out;
}

TrappingAnnulus trapping_annulus(const Params& p, const Perturbation& pert) {
  if (!(p.eta > 0.0)) fail(ErrorKind::PreconditionFailed, "trapping annulus needs eta > 0");
  if (p.eps == 0.0 || pert.g.empty()) return {0.0, true};
  const double unit = p.eps / p.eta / 8.0;
  const double e1 = std::expm1(-kTwoPi * p.eta);
  constexpr int kAngles = 256;
  for (int m = 1; m <= 800; ++m) {
    const double b = m * unit;
    if (b > kDefaultBand) break;
    bool ok = true;
    for (int i = 0; i < kAngles && ok; ++i) {
      const double th = kTwoPi * i / kAngles;
      const double up = e1 * b + p.eps * pert.g.value(th, b);
      const double down = -e1 * b + p.eps * pert.g.value(th, -b);
      ok = up < 0.0 && down > 0.0;
    }
    if (ok) return {b, true};
  }
  fail(ErrorKind::NotFound, "no trapping band up to 100 eps/eta");
}

}  // namespace circle
