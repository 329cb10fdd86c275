#include "circle/jet.hpp"

#include <cmath>

#include "circle/error.hpp"

namespace circle {

Jet Jet::constant(double v, int order) {
  Jet j(order);
  j.c_[0] = v;
  return j;
}

Jet Jet::variable(double v, int order) {
  Jet j(order);
  j.c_[0] = v;
  if (order >= 1) j.c_[1] = 1.0;
  return j;
}

double Jet::value(double x) const {
  double acc = 0.0;
  for (int i = order(); i >= 0; --i) acc = acc * x + c_[i];
  return acc;
}

Jet Jet::without_constant() const {
  Jet j = *this;
  j.c_[0] = 0.0;
  return j;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.order() > order()) c_.resize(o.c_.size(), 0.0);
  for (int i = 0; i <= o.order(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.order() > order()) c_.resize(o.c_.size(), 0.0);
  for (int i = 0; i <= o.order(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  const int n = std::max(a.order(), b.order());
  Jet r(n);
  for (int i = 0; i <= a.order(); ++i) {
    if (a.c_[i] == 0.0) continue;
    for (int j = 0; i + j <= n && j <= b.order(); ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
  }
  return r;
}

Jet operator+(Jet a, double s) {
  a[0] += s;
  return a;
}

Jet reciprocal(const Jet& a) {
  if (a[0] == 0.0) fail(ErrorKind::PreconditionFailed, "reciprocal of a jet with zero constant");
  const int n = a.order();
  Jet r(n);
  r[0] = 1.0 / a[0];
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += a[i] * r[k - i];
    r[k] = -s / a[0];
  }
  return r;
}

Jet power(const Jet& a, int m) {
  Jet r = Jet::constant(1.0, a.order());
  Jet base = a;
  while (m > 0) {
    if (m & 1) r = r * base;
    m >>= 1;
    if (m) base = base * base;
  }
  return r;
}

Jet compose(const std::vector<double>& outer, const Jet& inner) {
  if (inner[0] != 0.0) fail(ErrorKind::PreconditionFailed, "compose needs an inner jet without constant");
  const int n = inner.order();
  Jet r(n);
  // Horner; orders above n vanish since inner has no constant term.
  const int top = std::min(static_cast<int>(outer.size()) - 1, n);
  for (int m = top; m >= 0; --m) {
    r = r * inner;
    r[0] += outer[m];
  }
  return r;
}

Jet revert(const Jet& a) {
  if (a[0] != 0.0 || a[1] == 0.0) fail(ErrorKind::PreconditionFailed, "series reversion needs a0 = 0, a1 != 0");
  const int n = a.order();
  // Fixed point b = (x - (a - a1 x) o b) / a1, one order gained per sweep.
  Jet x(n);
  if (n >= 1) x[1] = 1.0;
  Jet nonlinear = a;
  nonlinear[1] = 0.0;
  Jet b = x * (1.0 / a[1]);
  for (int it = 1; it < n; ++it) b = (x - compose(nonlinear.coeffs(), b)) * (1.0 / a[1]);
  return b;
}

std::vector<double> trig_taylor(const TrigPoly& u, double xi, int order) {
  std::vector<double> out(static_cast<size_t>(order) + 1, 0.0);
  const int n = u.cutoff();
  if (!u.is_real()) {
    for (int m = 0; m <= order; ++m) {
      cd s = 0.0;
      for (int k = -n; k <= n; ++k) s += u.coeff(k) * std::pow(cd(0.0, k), m) * std::polar(1.0, k * xi);
      out[m] = s.real() / std::tgamma(m + 1.0);
    }
    return out;
  }
  // terms[k] = 2 c_k (ik)^m e^{ik xi}, advanced one derivative per order.
  std::vector<cd> terms(static_cast<size_t>(n) + 1);
  const cd z = std::polar(1.0, xi);
  cd zk = 1.0;
  for (int k = 0; k <= n; ++k) {
    terms[k] = k == 0 ? u.coeff(0) : 2.0 * u.coeff(k) * zk;
    zk *= z;
  }
  double fact = 1.0;
  for (int m = 0; m <= order; ++m) {
    if (m > 0) fact *= m;
    cd s = 0.0;
    for (int k = 1; k <= n; ++k) {
      terms[k] *= (m == 0 ? cd(1.0) : cd(0.0, k));
      s += terms[k];
    }
    out[m] = ((m == 0 ? terms[0].real() : 0.0) + s.real()) / fact;
  }
  return out;
}

Jet compose_trig(const TrigPoly& u, const Jet& at) {
  const auto t = trig_taylor(u, at[0], at.order());
  return compose(t, at.without_constant());
}

}  // namespace circle
