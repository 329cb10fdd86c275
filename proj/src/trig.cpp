#include "circle/trig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "circle/error.hpp"
#include "circle/fft.hpp"
#include "circle/kernels.hpp"

namespace circle {
namespace {

int wrap_index(int k, int m) {
  int r = k % m;
  return r < 0 ? r + m : r;
}

}  // namespace

TrigPoly::TrigPoly(int cutoff, bool real, double width)
    : cutoff_(cutoff), real_(real), width_(width), coeffs_(2 * static_cast<size_t>(cutoff) + 1) {
  if (cutoff < 0) fail(ErrorKind::PreconditionFailed, "negative cutoff");
}

TrigPoly TrigPoly::from_coeffs(std::vector<cd> coeffs, bool real, double width) {
  if (coeffs.size() % 2 == 0) fail(ErrorKind::PreconditionFailed, "coefficient count must be odd");
  const int n = static_cast<int>(coeffs.size() / 2);
  TrigPoly f(n, real, width);
  f.coeffs_ = std::move(coeffs);
  if (real) {
    double scale = 0.0, asym = 0.0;
    for (int k = 0; k <= n; ++k) {
      scale = std::max(scale, std::abs(f.coeff(k)));
      asym = std::max(asym, std::abs(f.coeff(-k) - std::conj(f.coeff(k))));
    }
    if (asym > 1e-10 * std::max(scale, 1e-300) && asym > 1e-300)
      fail(ErrorKind::PreconditionFailed, "real series without Hermitian symmetry");
    for (int k = 0; k <= n; ++k) {
      const cd sym = 0.5 * (f.coeff(k) + std::conj(f.coeff(-k)));
      f.set_coeff(k, sym);
      f.set_coeff(-k, std::conj(sym));
    }
  }
  return f;
}

TrigPoly TrigPoly::constant(double c, int cutoff) {
  TrigPoly f(cutoff);
  f.set_coeff(0, c);
  return f;
}

TrigPoly TrigPoly::cos_mode(int k, double amplitude) {
  k = std::abs(k);
  TrigPoly f(k);
  if (k == 0) {
    f.set_coeff(0, amplitude);
  } else {
    f.set_coeff(k, 0.5 * amplitude);
    f.set_coeff(-k, 0.5 * amplitude);
  }
  return f;
}

TrigPoly TrigPoly::sin_mode(int k, double amplitude) {
  if (k == 0) return TrigPoly(0);
  const double sign = k > 0 ? 1.0 : -1.0;
  k = std::abs(k);
  TrigPoly f(k);
  // sin(kt) = (e^{ikt} - e^{-ikt}) / 2i
  f.set_coeff(k, cd(0.0, -0.5 * amplitude * sign));
  f.set_coeff(-k, cd(0.0, 0.5 * amplitude * sign));
  return f;
}

TrigPoly TrigPoly::from_grid(std::span<const double> values, int cutoff) {
  std::vector<cd> v(values.begin(), values.end());
  TrigPoly f = from_grid_complex(v, cutoff);
  f.real_ = true;
  for (int k = 0; k <= f.cutoff_; ++k) {
    const cd sym = 0.5 * (f.coeff(k) + std::conj(f.coeff(-k)));
    f.set_coeff(k, sym);
    f.set_coeff(-k, std::conj(sym));
  }
  return f;
}

TrigPoly TrigPoly::from_grid_complex(std::span<const cd> values, int cutoff) {
  const int m = static_cast<int>(values.size());
  if (m == 0) fail(ErrorKind::PreconditionFailed, "empty grid");
  const int usable = std::min(cutoff, (m - 1) / 2);
  std::vector<cd> spectrum(values.size());
  fft::forward(values, spectrum);
  TrigPoly f(cutoff, false);
  for (int k = -usable; k <= usable; ++k) f.set_coeff(k, spectrum[wrap_index(k, m)] / double(m));
  return f;
}

TrigPoly TrigPoly::from_function(const std::function<double(double)>& fn, int cutoff, int grid) {
  std::vector<double> v(static_cast<size_t>(grid));
  for (int j = 0; j < grid; ++j) v[j] = fn(kTwoPi * j / grid);
  return from_grid(v, cutoff);
}

cd TrigPoly::coeff(int k) const {
  if (k < -cutoff_ || k > cutoff_) return {0.0, 0.0};
  return coeffs_[static_cast<size_t>(k + cutoff_)];
}

void TrigPoly::set_coeff(int k, cd value) {
  if (k < -cutoff_ || k > cutoff_) fail(ErrorKind::PreconditionFailed, "mode beyond cutoff");
  if (real_) {
    // keep the Hermitian pairing
    if (k == 0) value = cd(value.real(), 0.0);
    coeffs_[static_cast<size_t>(-k + cutoff_)] = std::conj(value);
  }
  coeffs_[static_cast<size_t>(k + cutoff_)] = value;
}

cd TrigPoly::eval(double theta) const {
  const cd z = std::polar(1.0, theta);
  cd zk = 1.0;
  cd sum = coeff(0);
  if (real_) {
    cd acc = 0.0;
    for (int k = 1; k <= cutoff_; ++k) {
      zk *= z;
      acc += coeff(k) * zk;
    }
    return sum + 2.0 * acc.real();
  }
  for (int k = 1; k <= cutoff_; ++k) {
    zk *= z;
    sum += coeff(k) * zk + coeff(-k) * std::conj(zk);
  }
  return sum;
}

void TrigPoly::eval_batch(std::span<const double> theta, std::span<double> out) const {
  std::vector<double> a(static_cast<size_t>(cutoff_) + 1), b(a.size());
  a[0] = coeff(0).real();
  for (int k = 1; k <= cutoff_; ++k) {
    a[k] = coeff(k).real() + coeff(-k).real();
    b[k] = coeff(-k).imag() - coeff(k).imag();
  }
  kernels::eval_trig_series(a, b, theta, out);
}

std::vector<double> TrigPoly::eval_batch(std::span<const double> theta) const {
  std::vector<double> out(theta.size());
  eval_batch(theta, out);
  return out;
}

std::vector<cd> TrigPoly::sample_complex(int grid) const {
  if (grid <= 0) fail(ErrorKind::PreconditionFailed, "grid must be positive");
  // Folding modes onto the grid gives exact samples for any grid size.
  std::vector<cd> folded(static_cast<size_t>(grid)), out(static_cast<size_t>(grid));
  for (int k = -cutoff_; k <= cutoff_; ++k) folded[wrap_index(k, grid)] += coeff(k);
  fft::backward(folded, out);
  return out;
}

std::vector<double> TrigPoly::sample(int grid) const {
  const auto values = sample_complex(grid);
  std::vector<double> out(values.size());
  for (size_t j = 0; j < values.size(); ++j) out[j] = values[j].real();
  return out;
}

double TrigPoly::norm_s(double s) const {
  double sum = 0.0;
  for (int k = -cutoff_; k <= cutoff_; ++k) sum += std::abs(coeff(k)) * std::exp(std::abs(k) * s);
  return sum;
}

double TrigPoly::oscillation_norm() const {
  double sum = 0.0;
  for (int k = -cutoff_; k <= cutoff_; ++k)
    if (k != 0) sum += std::abs(coeff(k));
  return sum;
}

double TrigPoly::sup_norm() const {
  const int grid = std::max(8 * cutoff_, 64);
  double m = 0.0;
  for (const cd& v : sample_complex(grid)) m = std::max(m, std::abs(v));
  return m;
}

TrigPoly TrigPoly::derivative(int order) const {
  TrigPoly d = *this;
  for (int k = -cutoff_; k <= cutoff_; ++k) d.set_coeff(k, coeff(k) * std::pow(cd(0.0, k), order));
  return d;
}

TrigPoly TrigPoly::truncated(int cutoff) const {
  if (cutoff >= cutoff_) return padded(cutoff);
  TrigPoly t(cutoff, real_, width_);
  t.tail_ = tail_;
  for (int k = -cutoff_; k <= cutoff_; ++k) {
    if (std::abs(k) <= cutoff)
      t.set_coeff(k, coeff(k));
    else
      t.tail_ += std::abs(coeff(k));
  }
  return t;
}

TrigPoly TrigPoly::padded(int cutoff) const {
  if (cutoff < cutoff_) return truncated(cutoff);
  TrigPoly t(cutoff, real_, width_);
  t.tail_ = tail_;
  for (int k = -cutoff_; k <= cutoff_; ++k) t.set_coeff(k, coeff(k));
  return t;
}

TrigPoly TrigPoly::with_mean(double m) const {
  TrigPoly t = *this;
  t.set_coeff(0, m);
  return t;
}

TrigPoly TrigPoly::operator-() const {
  TrigPoly t = *this;
  for (cd& c : t.coeffs_) c = -c;
  return t;
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& other) {
  if (other.cutoff_ > cutoff_) *this = padded(other.cutoff_);
  for (int k = -other.cutoff_; k <= other.cutoff_; ++k) coeffs_[k + cutoff_] += other.coeff(k);
  real_ = real_ && other.real_;
  tail_ += other.tail_;
  return *this;
}

TrigPoly& TrigPoly::operator-=(const TrigPoly& other) { return *this += -other; }

TrigPoly& TrigPoly::operator*=(double a) {
  for (cd& c : coeffs_) c *= a;
  tail_ *= std::abs(a);
  return *this;
}

TrigPoly product(const TrigPoly& f, const TrigPoly& g) {
  const int n = f.cutoff_ + g.cutoff_;
  TrigPoly p(n, f.real_ && g.real_, std::min(f.width_, g.width_));
  p.tail_ = f.tail_ * g.norm_s(0.0) + g.tail_ * f.norm_s(0.0);
  const size_t work = f.coeffs_.size() * g.coeffs_.size();
  if (work <= 16384) {
    for (int i = -f.cutoff_; i <= f.cutoff_; ++i) {
      const cd fi = f.coeff(i);
      if (fi == cd(0.0)) continue;
      for (int j = -g.cutoff_; j <= g.cutoff_; ++j) p.coeffs_[i + j + n] += fi * g.coeff(j);
    }
  } else {
    // Grid of at least 2n+1 points makes the pointwise product alias-free.
    const int grid = 2 * n + 2;
    auto fv = f.sample_complex(grid);
    const auto gv = g.sample_complex(grid);
    for (size_t j = 0; j < fv.size(); ++j) fv[j] *= gv[j];
    TrigPoly q = TrigPoly::from_grid_complex(fv, n);
    for (int k = -n; k <= n; ++k) p.set_coeff(k, q.coeff(k));
  }
  if (p.real_) {
    for (int k = 0; k <= n; ++k) {
      const cd sym = 0.5 * (p.coeff(k) + std::conj(p.coeff(-k)));
      p.set_coeff(k, sym);
      p.set_coeff(-k, std::conj(sym));
    }
  }
  return p;
}

TrigPoly compose_rotation(const TrigPoly& f, double beta) {
  TrigPoly r = f;
  for (int k = -f.cutoff(); k <= f.cutoff(); ++k) r.set_coeff(k, f.coeff(k) * std::polar(1.0, k * beta));
  return r;
}

CircleLift::CircleLift(double base_rotation, TrigPoly periodic)
    : base_(base_rotation), periodic_(std::move(periodic)), dperiodic_(periodic_.derivative()) {
  const int grid = std::max(8 * periodic_.cutoff(), 64);
  const auto d = dperiodic_.sample(grid);
  min_derivative_ = 1.0 + *std::min_element(d.begin(), d.end());
  // Between nodes u' can dip by at most (half spacing) * sup|u''|.
  const double margin = (kPi / grid) * periodic_.derivative(2).norm_s(0.0);
  monotone_ = min_derivative_ - margin > 0.0;
}

double invert_lift(const CircleLift& u, double y, double tol) {
  if (!u.monotone()) fail(ErrorKind::NotMonotone, "lift is not certified monotone");
  const double bound = u.periodic().norm_s(0.0);
  const double slack = 1e-12 + 1e-15 * std::abs(y);
  double lo = y - u.base_rotation() - bound - slack;
  double hi = y - u.base_rotation() + bound + slack;
  const double floor = 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(y) + 1.0);
  const double accept = std::max(tol, floor);
  int budget = 200;
  while (hi - lo > 1e-6) {
    if (--budget < 0) fail(ErrorKind::NoConvergence, "invert_lift bisection");
    const double mid = 0.5 * (lo + hi);
    (u(mid) < y ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    const double g = u(t) - y;
    if (std::abs(g) <= accept) return t;
    if (g < 0) lo = std::max(lo, t); else hi = std::min(hi, t);
    double next = t - g / u.derivative(t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t) break;
    t = next;
  }
  if (std::abs(u(t) - y) <= accept) return t;
  fail(ErrorKind::NoConvergence, "invert_lift Newton polish did not reach tolerance");
}

void to_json(nlohmann::json& j, const TrigPoly& f) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const cd& c : f.coeffs()) coeffs.push_back({c.real(), c.imag()});
  j = {{"N", f.cutoff()}, {"coeffs", coeffs}, {"s", f.width()}, {"real", f.is_real()}};
}

void from_json(const nlohmann::json& j, TrigPoly& f) {
  try {
    const int n = j.at("N").get<int>();
    const auto& arr = j.at("coeffs");
    if (static_cast<int>(arr.size()) != 2 * n + 1)
      fail(ErrorKind::ParseError, "TrigPoly: coeffs length must be 2N+1");
    std::vector<cd> coeffs;
    coeffs.reserve(arr.size());
    for (const auto& c : arr) coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    f = TrigPoly::from_coeffs(std::move(coeffs), j.value("real", true), j.value("s", 0.0));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("TrigPoly: ") + e.what());
  }
}

}  // namespace circle

namespace circle {

TrigPoly map_values(const TrigPoly& f, const std::function<double(double)>& fn, double tol,
                    int max_cutoff) {
  int n = std::max(16, 2 * f.cutoff());
  for (;;) {
    const int grid = 4 * n;
    auto v = f.sample(grid);
    for (double& x : v) x = fn(x);
    TrigPoly out = TrigPoly::from_grid(v, n);
    double upper = 0.0;
    for (int k = n / 2 + 1; k <= n; ++k) upper += 2.0 * std::abs(out.coeff(k));
    if (upper <= tol * (1.0 + out.norm_s(0.0))) return out.truncated(n / 2);
    if (n >= max_cutoff) fail(ErrorKind::CutoffTooSmall, "map_values: spectrum does not decay");
    n *= 2;
  }
}

TrigPoly TrigPoly::denoised(double abs_floor, double rel_floor) const {
  const double floor = std::max(abs_floor, rel_floor * norm_s(0.0));
  // Spectra of the analytic data decay; everything past the first mode that
  // drops under the floor is treated as roundoff.
  int keep = cutoff_;
  for (int k = 1; k <= cutoff_; ++k) {
    if (std::abs(coeff(k)) <= floor && std::abs(coeff(-k)) <= floor) {
      keep = k - 1;
      break;
    }
  }
  return truncated(keep);
}

}  // namespace circle
