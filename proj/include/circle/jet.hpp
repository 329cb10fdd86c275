#pragma once

#include <vector>

#include "circle/trig.hpp"

namespace circle {

/// Truncated power series c_0 + c_1 x + ... + c_n x^n.
class Jet {
 public:
  explicit Jet(int order = 0) : c_(static_cast<size_t>(order) + 1, 0.0) {}
  Jet(std::vector<double> coeffs) : c_(std::move(coeffs)) {}
  static Jet constant(double v, int order);
  /// v + x
  static Jet variable(double v, int order);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int i) const { return i <= order() ? c_[i] : 0.0; }
  double& operator[](int i) { return c_[i]; }
  const std::vector<double>& coeffs() const { return c_; }
  double value(double x) const;
  Jet without_constant() const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator*(const Jet& a, const Jet& b);

 private:
  std::vector<double> c_;
};

Jet operator+(Jet a, double s);
Jet reciprocal(const Jet& a);
Jet power(const Jet& a, int m);
/// sum_m outer[m] inner^m; inner must have zero constant term.
Jet compose(const std::vector<double>& outer, const Jet& inner);
/// Series inverse of a (zero constant, nonzero linear term).
Jet revert(const Jet& a);

/// u^{(m)}(xi) / m! for m = 0..order.
std::vector<double> trig_taylor(const TrigPoly& u, double xi, int order);

/// u(base + delta(x)) as a jet, expanded at base + delta_0.
Jet compose_trig(const TrigPoly& u, const Jet& at);

}  // namespace circle
