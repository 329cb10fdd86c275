#pragma once

#include <optional>
#include <vector>

#include "circle/maps.hpp"
#include "circle/trig.hpp"

namespace circle {

struct NewtonStep {
  double defect = 0.0;  // sup |E| before the step
  double step_gamma = 0.0;
  double step_h = 0.0;
  double step_lambda = 0.0;
};

struct NewtonTrace {
  std::vector<NewtonStep> steps;
  /// max defect_{n+1} / defect_n^2 over steps that start below 1e-3
  double quadratic_K = 0.0;
  bool quadratic_tail = false;
};

/// Q(theta, gamma(theta)) = (h R h^{-1}(theta), lambda + gamma(h R h^{-1}(theta)))
/// in the russ_r chart. Internally K(xi) = (xi + p(xi), w(xi)) with
/// h = id + p and w = gamma o h.
struct TranslatedCurve {
  TrigPoly gamma;
  CircleLift h = CircleLift::identity();
  double lambda = 0.0;
  double defect = 0.0;
  Params params;
  TrigPoly p;  // periodic part of h
  TrigPoly w;  // gamma o h
  double gamma_mean = 0.0;
  int iterations = 0;
};

struct RussmannOptions {
  int grid = 256;
  double tol = 1e-12;       // sup |E| at which Newton stops
  double accept = 1e-9;     // curve defect required on return
  int max_iter = 60;
  double eps0 = 1e-3;
  int stagnation = 10;
};

/// Throws NoConvergence, DivisorFailure, EpsTooLarge, PreconditionFailed.
TranslatedCurve solve_translated_curve(const Params& p, const Perturbation& pert,
                                       const std::optional<TranslatedCurve>& guess = std::nullopt,
                                       const RussmannOptions& opt = {}, NewtonTrace* trace = nullptr);

/// sup over 512 angles of the two-component invariance error of the curve.
double curve_defect(const Params& p, const Perturbation& pert, const TranslatedCurve& tc, int grid = 512);

/// Rotation number (turns) of theta -> h(h^{-1}(theta) + 2 pi alpha).
double tangential_rotation_number(const TranslatedCurve& tc, int steps = 1 << 14);

/// Rotation number of a Q-orbit started on the curve.
double orbit_rotation_number(const Params& p, const Perturbation& pert, const TranslatedCurve& tc,
                             int steps = 1 << 14);

/// (lambda(nu + delta) - lambda(nu - delta)) / (2 delta)
double dlambda_dnu(const Params& p, const Perturbation& pert, double delta = 1e-4,
                   const RussmannOptions& opt = {});

struct CAlphaResult {
  double nu_star = 0.0;
  TranslatedCurve curve;
  double K = 0.0;  // |nu* - alpha| / eps
  int evaluations = 0;
};

/// Root of nu -> lambda on the bracket. Throws NoSignChange, PreconditionFailed,
/// NoConvergence.
CAlphaResult find_c_alpha(const Params& p0, const Perturbation& pert, double nu_lo, double nu_hi,
                          const RussmannOptions& opt = {}, const std::optional<TranslatedCurve>& guess = std::nullopt);

}  // namespace circle
