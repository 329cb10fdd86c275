#pragma once

#include "circle/diophantine.hpp"
#include "circle/trig.hpp"

namespace circle {

/// mu + a f(t + 2 pi alpha) - b f(t) = g(t)
struct DifferenceProblem {
  double a = 1.0;
  double b = 1.0;
  TrigPoly g;
  DiophantineNumber alpha;
};

struct DifferenceSolution {
  TrigPoly f;  // zero mean
  double mu = 0.0;
  double residual = 0.0;  // sup over a 4N grid
  TrigPoly g;
  double gamma = 0.0;
  double q = 1.0;
};

struct DifferenceOptions {
  /// Working cutoff N; 0 means twice the cutoff of g.
  int cutoff = 0;
  /// Allowed |.|_0 mass of g above N/2 (plus any recorded truncation tail).
  double tail_tolerance = 1e-13;
  double min_divisor = 1e-12;
};

/// Throws ResonantDivisor, CutoffTooSmall, ResidualTooLarge.
DifferenceSolution solve_difference(const DifferenceProblem& p, const DifferenceOptions& opt = {});

struct LogSolution {
  TrigPoly X;      // close to 1
  TrigPoly X_inv;  // 1 / X
  TrigPoly log_X;
  double beta1_bar = 0.0;
  double residual = 0.0;  // sup |B1 X / X(. + 2 pi alpha) - beta1_bar|
};

/// X with B1(t) X(t) / X(t + 2 pi alpha) = beta1_bar, a constant.
/// Throws NotPositive if B1 has a nonpositive grid value.
LogSolution solve_log_multiplicative(const TrigPoly& B1, const DiophantineNumber& alpha);

/// Frozen small-divisor constant of the norm estimate.
inline constexpr double kNormBoundConstant = 0.0582;

struct NormBoundCheck {
  bool holds = false;
  double lhs = 0.0;  // |f|_s
  double rhs = 0.0;  // C gamma^-1 sigma^-(q+1) |g|_{s+sigma}
};

NormBoundCheck check_norm_bound(const DifferenceSolution& sol, double s, double sigma);
bool verify_norm_bound(const DifferenceSolution& sol, double s, double sigma);

struct NormBoundProblem {
  DifferenceProblem problem;
  double s = 0.0;
  double sigma = 0.0;
};

/// Random a = b = 1 problems (golden and sqrt(2) - 1 alternating, cutoffs 4..63,
/// every third one sparse, s and sigma in [0.05, 0.5]).
std::vector<NormBoundProblem> norm_bound_corpus(unsigned seed, int count);

/// Max of |f|_s / (gamma^-1 sigma^-(q+1) |g|_{s+sigma}) over a fixed-seed corpus
/// of random a = b = 1 problems; the frozen constant is twice this.
double calibrate_norm_ratio(unsigned seed = 20240917u, int count = 100);

}  // namespace circle
