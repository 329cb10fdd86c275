#pragma once

#include <array>
#include <memory>
#include <vector>

#include <json.hpp>

#include "circle/diophantine.hpp"
#include "circle/trig.hpp"

namespace circle {

using Point = std::array<double, 2>;  // (angle lift, radial)
using Matrix2 = std::array<std::array<double, 2>, 2>;

struct Params {
  double nu = 0.0;
  double eta = 0.1;
  double eps = 0.0;
  DiophantineNumber alpha;
};

/// sum_j c_j(theta) rho^j
class BivariateTable {
 public:
  BivariateTable() = default;
  explicit BivariateTable(std::vector<TrigPoly> terms);

  const std::vector<TrigPoly>& terms() const { return terms_; }
  int degree() const { return static_cast<int>(terms_.size()) - 1; }
  bool empty() const { return terms_.empty(); }

  double value(double theta, double rho) const;
  double d_theta(double theta, double rho) const;
  double d_rho(double theta, double rho) const;
  /// value, d/dtheta, d/drho in one pass
  std::array<double, 3> value_and_gradient(double theta, double rho) const;
  /// (f_tt, f_tr, f_rr)
  std::array<double, 3> hessian(double theta, double rho) const;
  /// Coefficients of rho -> value(theta, rho0 + rho) in powers of rho.
  std::vector<double> taylor_in_rho(double theta, double rho0) const;

 private:
  std::vector<TrigPoly> terms_;
  std::vector<TrigPoly> dterms_;
  std::vector<TrigPoly> ddterms_;
};

/// The perturbation (f, g): angle += eps f, radius += eps g.
struct Perturbation {
  BivariateTable f;
  BivariateTable g;
  double A_f = 0.0;
  double A_g = 0.0;
  double A = 0.0;
  double C2_bound = 0.0;

  /// Builds the tables and records derivative bounds on T x [-1, 1].
  static Perturbation make(std::vector<TrigPoly> f_terms, std::vector<TrigPoly> g_terms);
  /// f = sin(theta), g = cos(theta) scaled by `amplitude`
  static Perturbation sin_cos(double amplitude = 1.0);
};

struct DerivativeBounds {
  double first = 0.0;   // max(sup|d_theta|, sup|d_rho|)
  double second = 0.0;  // max of second partials
};

/// Sup norms on a 512 x 65 grid over T x [-1, 1], times 1.05.
DerivativeBounds derivative_bounds(const BivariateTable& t);

void to_json(nlohmann::json& j, const Perturbation& p);
void from_json(const nlohmann::json& j, Perturbation& p);

/// Coordinates relative to raw (theta, rho) beyond the fixed shifts.
class FrameTransform {
 public:
  virtual ~FrameTransform() = default;
  /// From the russ_r chart to the local chart.
  virtual Point to_local(const Point& russ) const = 0;
  virtual Point from_local(const Point& local) const = 0;
};

enum class FrameTag { Raw, DioShift, RussR, RussXiX, NormalThetaR };

struct Frame {
  FrameTag tag = FrameTag::Raw;
  std::shared_ptr<const FrameTransform> transform;  // RussXiX, NormalThetaR

  static Frame raw() { return {}; }
  static Frame dio_shift() { return {FrameTag::DioShift, nullptr}; }
  static Frame russ_r() { return {FrameTag::RussR, nullptr}; }
};

const char* to_string(FrameTag tag);

/// e^{-2 pi eta}
double contraction_factor(const Params& p);
/// (1 - e^{-2 pi eta}) / eta
double twist(const Params& p);
/// tau = 2 pi eta (nu - alpha)
double translation_tau(const Params& p);
/// r_alpha = (nu - alpha)[1 + 2 pi eta / (e^{-2 pi eta} - 1)], in the dio_shift chart
double radius_r_alpha(const Params& p);
/// rho-offset of the russ_r chart: r = rho + russ_offset
double russ_offset(const Params& p);

Point to_frame(const Params& p, const Frame& frame, const Point& raw);
Point from_frame(const Params& p, const Frame& frame, const Point& local);

inline constexpr double kDefaultBand = 2.0;

Point eval_P(const Params& p, const Frame& frame, const Point& pt);
/// Throws OutOfDomain when |rho| exceeds `band` in the raw chart.
Point eval_Q(const Params& p, const Perturbation& pert, const Frame& frame, const Point& pt,
             double band = kDefaultBand);
Matrix2 jacobian_Q(const Params& p, const Perturbation& pert, const Frame& frame, const Point& pt,
                   double band = kDefaultBand);
std::vector<Point> orbit(const Params& p, const Perturbation& pert, const Frame& frame,
                         const Point& start, int steps, double band = kDefaultBand);

struct TrappingAnnulus {
  double band = 0.0;
  bool verified = false;
};

/// Smallest b in {eps/(8 eta), 2 eps/(8 eta), ...} with rho' < rho at rho = b and
/// rho' > rho at rho = -b over 256 angles. Throws NotFound past 100 eps/eta.
TrappingAnnulus trapping_annulus(const Params& p, const Perturbation& pert);

}  // namespace circle
