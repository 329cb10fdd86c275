#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

namespace circle {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Truncated Fourier series f(t) = sum_{|k|<=N} c_k e^{ikt} on the circle,
/// tagged with an analyticity width s. Real-valued series keep
/// c_{-k} = conj(c_k); the flag is fixed at construction.
class TrigPoly {
 public:
  TrigPoly() : TrigPoly(0) {}
  explicit TrigPoly(int cutoff, bool real = true, double width = 0.0);

  /// coeffs are ordered k = -N..N. Real series are checked for Hermitian
  /// symmetry and symmetrized.
  static TrigPoly from_coeffs(std::vector<cd> coeffs, bool real = true, double width = 0.0);
  static TrigPoly constant(double c, int cutoff = 0);
  static TrigPoly cos_mode(int k, double amplitude = 1.0);
  static TrigPoly sin_mode(int k, double amplitude = 1.0);
  /// Coefficients |k| <= cutoff from samples on the uniform grid 2 pi j / M.
  static TrigPoly from_grid(std::span<const double> values, int cutoff);
  static TrigPoly from_grid_complex(std::span<const cd> values, int cutoff);
  /// Samples fn on a grid of `grid` points and keeps |k| <= cutoff.
  static TrigPoly from_function(const std::function<double(double)>& fn, int cutoff, int grid);

  int cutoff() const { return cutoff_; }
  double width() const { return width_; }
  bool is_real() const { return real_; }
  TrigPoly& set_width(double s) {
    width_ = s;
    return *this;
  }

  cd coeff(int k) const;
  void set_coeff(int k, cd value);
  std::span<const cd> coeffs() const { return coeffs_; }
  /// Norm of coefficients discarded by truncations that produced this value.
  double truncation_tail() const { return tail_; }

  cd eval(double theta) const;
  double operator()(double theta) const { return eval(theta).real(); }
  /// Real part at arbitrary points, via the dispatched SIMD kernel.
  void eval_batch(std::span<const double> theta, std::span<double> out) const;
  std::vector<double> eval_batch(std::span<const double> theta) const;
  /// Values on the uniform grid 2 pi j / M (real part).
  std::vector<double> sample(int grid) const;
  std::vector<cd> sample_complex(int grid) const;

  double mean() const { return coeff(0).real(); }
  /// sum_k |c_k| e^{|k| s}; bounds the sup over the strip |Im t| <= s.
  double norm_s(double s) const;
  /// sum_{k != 0} |c_k|
  double oscillation_norm() const;
  /// Max modulus over a uniform grid of max(8N, 64) points.
  double sup_norm() const;

  TrigPoly derivative(int order = 1) const;
  /// Keeps |k| <= cutoff; the discarded |.|_0 mass is added to the tail.
  TrigPoly truncated(int cutoff) const;
  TrigPoly padded(int cutoff) const;
  TrigPoly with_mean(double m) const;
  /// Truncates before the first mode with |c_k| <= max(abs_floor, rel_floor |f|_0);
  /// keeps high-order derivatives of computed data free of roundoff plateaus.
  TrigPoly denoised(double abs_floor = 1e-15, double rel_floor = 1e-13) const;

  TrigPoly operator-() const;
  TrigPoly& operator+=(const TrigPoly& other);
  TrigPoly& operator-=(const TrigPoly& other);
  TrigPoly& operator*=(double a);
  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
  friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
  friend TrigPoly operator*(TrigPoly a, double s) { return a *= s; }
  friend TrigPoly operator*(double s, TrigPoly a) { return a *= s; }

 private:
  int cutoff_;
  bool real_;
  double width_;
  double tail_ = 0.0;
  std::vector<cd> coeffs_;

  friend TrigPoly product(const TrigPoly& f, const TrigPoly& g);
};

/// Exact coefficient convolution; the cutoff grows to N_f + N_g.
TrigPoly product(const TrigPoly& f, const TrigPoly& g);
/// t -> f(t + beta)
TrigPoly compose_rotation(const TrigPoly& f, double beta);

/// t -> fn(f(t)) as a trig series; the cutoff doubles until the upper half of
/// the spectrum carries less than tol (relative). Throws CutoffTooSmall past
/// max_cutoff.
TrigPoly map_values(const TrigPoly& f, const std::function<double(double)>& fn,
                    double tol = 1e-15, int max_cutoff = 8192);

/// u(t) = t + base_rotation + periodic(t), a lift of a circle map.
class CircleLift {
 public:
  CircleLift(double base_rotation, TrigPoly periodic);
  static CircleLift identity() { return CircleLift(0.0, TrigPoly(0)); }

  double base_rotation() const { return base_; }
  const TrigPoly& periodic() const { return periodic_; }
  double operator()(double t) const { return t + base_ + periodic_(t); }
  double derivative(double t) const { return 1.0 + dperiodic_(t); }

  /// Certified on a grid of 8N points with a second-derivative margin.
  bool monotone() const { return monotone_; }
  double min_derivative() const { return min_derivative_; }

 private:
  double base_;
  TrigPoly periodic_;
  TrigPoly dperiodic_;
  bool monotone_ = false;
  double min_derivative_ = 0.0;
};

/// theta with |u(theta) - y| <= tol: bisection to a 1e-6 bracket, then Newton.
/// Throws NotMonotone or NoConvergence.
double invert_lift(const CircleLift& u, double y, double tol = 1e-14);

void to_json(nlohmann::json& j, const TrigPoly& f);
void from_json(const nlohmann::json& j, TrigPoly& f);

}  // namespace circle
