#pragma once

#include <span>
#include <vector>

namespace circle {

/// An irrational rotation alpha in (0,1) with constants (gamma, q) such that
/// |k alpha - l| >= gamma / k^q for every 1 <= k <= cutoff_K.
struct DiophantineNumber {
  double alpha = 0.0;
  std::vector<long> cf;
  double gamma = 0.0;
  double q = 1.0;
  int cutoff_K = 0;
};

double golden_mean();

/// Partial quotients a_1..a_depth of alpha in (0,1). Throws RationalDetected
/// when a remainder vanishes before `depth` quotients are produced.
std::vector<long> continued_fraction(double alpha, int depth);

/// Denominators q_1, q_2, ... of the convergents built from partial quotients.
std::vector<long> convergent_denominators(std::span<const long> cf);

/// gamma = min_{1<=k<=K} k^q dist(k alpha, Z). Throws GammaUnderflow below 1e-12.
DiophantineNumber certify(double alpha, double q, int K);

/// Distance from x to the nearest integer.
double dist_to_integer(double x);

enum class RotationEstimator { Birkhoff, ConvergentAcceleration };

struct RotationEstimate {
  double value = 0.0;
  double error = 0.0;
};

/// Rotation number (in turns) of an orbit of lifted angles theta_n.
/// Birkhoff: smooth-weight Birkhoff average of the increments.
/// ConvergentAcceleration: plain averages over dyadic lengths with Richardson
/// extrapolation. Throws TooShort below 100 iterates.
RotationEstimate rotation_number(std::span<const double> orbit,
                                 RotationEstimator mode = RotationEstimator::Birkhoff);

}  // namespace circle
