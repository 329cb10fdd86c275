#pragma once

#include <optional>
#include <string>
#include <vector>

#include "circle/diophantine.hpp"
#include "circle/graphflow.hpp"
#include "circle/maps.hpp"
#include "circle/russmann.hpp"

namespace circle {

/// Q in (xi, x) coordinates around a translated curve:
/// xi' = xi + 2 pi alpha + sum_i A_i(xi) x^i, x' = sum_i B_i(xi) x^i.
/// Index 0 holds the (defect-sized) angular offset and the translation.
struct LocalizedMap {
  std::vector<TrigPoly> A;
  std::vector<TrigPoly> B;
  double lambda = 0.0;
  int k_max = 4;
  int order = 12;  // Taylor order carried internally
  double tail_bound = 0.0;
  double omega = 0.0;
  Params params;
  TranslatedCurve curve;
};

struct LocalizeOptions {
  int k_max = 4;
  int extra_orders = 8;
  int grid = 128;
  double fd_tolerance = 1e-7;
};

/// Throws TaylorUnstable when the finite-difference check in x fails.
LocalizedMap localize(const Params& p, const Perturbation& pert, const TranslatedCurve& tc,
                      const LocalizeOptions& opt = {});

enum class ChangeKind { LogScale, Radial, Angular };

/// One change of variables (old -> new):
///   LogScale: y = x / X(xi);  Radial: y = x + X(xi) x^i;  Angular: xi_new = xi + Z(xi) y^i.
struct CoordChange {
  ChangeKind kind = ChangeKind::Radial;
  int order = 1;
  TrigPoly fn;
  TrigPoly fn_inv;  // 1 / X for LogScale
  TrigPoly dfn;

  Point forward(const Point& pt) const;
  Point inverse(const Point& pt) const;
};

struct NormalFormResult {
  std::vector<double> alpha_bar;  // index 1..k (0 unused)
  std::vector<double> beta_bar;   // index 1..k (0 unused)
  double lambda = 0.0;            // mean of the final order-0 radial term
  std::vector<CoordChange> transform_stack;
  std::vector<double> residual_angular;  // nonzero-mode norm of A_i after reduction, i = 0..k
  std::vector<double> residual_radial;   // same for B_i
  double max_residual = 0.0;             // over orders 1..k
  LocalizedMap reduced;                  // coefficients after all changes
  double log_beta1 = 0.0;                // exp(mean log B_1) of the localized map
  int k = 4;
};

struct ReduceOptions {
  double targeted_tolerance = 1e-10;
  double blowup = 10.0;
};

/// Throws ResonantDivisor, OrderBlowup, NotPositive, ResidualTooLarge.
NormalFormResult reduce(const LocalizedMap& lm, const DiophantineNumber& alpha, int k,
                        const ReduceOptions& opt = {});

/// Raw (theta, rho) <-> normal (Theta, R) through russ_r, the curve chart and the stack.
class NormalFormTransform : public FrameTransform {
 public:
  NormalFormTransform(const Params& p, const TranslatedCurve& tc, std::vector<CoordChange> stack);
  Point to_local(const Point& russ) const override;
  Point from_local(const Point& local) const override;

  Point raw_to_normal(const Point& raw) const;
  Point normal_to_raw(const Point& nf) const;

 private:
  Params params_;
  CircleLift h_;
  TrigPoly w_;
  std::vector<CoordChange> stack_;
};

Frame normal_frame(const Params& p, const TranslatedCurve& tc, const NormalFormResult& nf);
Frame curve_frame(const Params& p, const TranslatedCurve& tc);

/// (Theta, R) -> reduced polynomial map with the fitted coefficients.
Point eval_reduced(const NormalFormResult& nf, const Point& pt);

/// sup |T^{-1} T x - x| over `count` random raw points near the curve.
double roundtrip_error(const Params& p, const TranslatedCurve& tc, const NormalFormResult& nf, int count = 10000,
                       double y_max = 0.1, unsigned seed = 3u);
/// sup |T Q T^{-1}(z) - Q_reduced(z)| over random z with |y| <= y_max.
double commutation_error(const Params& p, const Perturbation& pert, const TranslatedCurve& tc,
                         const NormalFormResult& nf, int count = 2000, double y_max = 0.1, unsigned seed = 5u);

/// Root of R = lambda + sum beta_bar_i R^i by Newton from -lambda/(beta_bar_1 - 1).
/// Throws PreconditionFailed if |beta_bar_1 - 1| <= 1e-8, NoRoot if |R| leaves 1.
double invariant_radius(const NormalFormResult& nf);
/// beta_bar_1 + sum_{i>=2} i beta_bar_i R0^{i-1}
double radial_multiplier(const NormalFormResult& nf, double R0);

enum class RegionTag { Thm1, Thm2, OnCAlpha, Unresolved };
const char* to_string(RegionTag tag);

struct RegionReport {
  double nu = 0.0, eta = 0.0, eps = 0.0;
  RegionTag tag = RegionTag::Unresolved;
  bool gate_admissible = false;
  bool thm2_eps = false;  // eta >= c2 eps
  bool thm2_nu = false;   // eta >= sqrt(2 pi) |nu - alpha|
  double c2 = 0.0;
  std::optional<double> residual;
  std::optional<double> lambda;
  std::string error;
};

struct RegionOptions {
  double c = kDefaultGateCap;
  double c2 = 0.0;  // 0: 10 (A + M)
  bool solve_lambda = false;
  RussmannOptions russmann;
};

double default_c2(const Perturbation& pert);

RegionReport classify_region(const Params& p, const Perturbation& pert, const RegionOptions& opt = {});

struct CircleVerification {
  double residual = 0.0;     // raw-coordinate invariance residual
  double R0 = 0.0;
  double multiplier = 0.0;
  int iterations = 0;
  std::optional<double> curve_agreement;  // vs the translated curve, when lambda ~ 0
  LipGraph graph;            // (R - R0) / band over Theta
  double band = 0.05;
};

struct VerifyOptions {
  double band = 0.05;
  int grid = 128;
  double k = 0.1;
  double tol = 1e-11;
  int max_iter = 20000;
  RegionOptions region;
};

/// Runs the graph transform on the recentred normal-form map. Throws
/// PreconditionFailed outside the below-gate region and graphflow errors.
CircleVerification verify_circle_in_region(const Params& p, const Perturbation& pert, const TranslatedCurve& tc,
                                           const NormalFormResult& nf, const VerifyOptions& opt = {});

}  // namespace circle
