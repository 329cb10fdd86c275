#include "circle/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "circle/error.hpp"
#include "circle/kernels.hpp"
#include "circle/trig.hpp"

namespace circle {

double golden_mean() { return (std::sqrt(5.0) - 1.0) / 2.0; }

double dist_to_integer(double x) { return std::abs(x - std::nearbyint(x)); }

std::vector<long> continued_fraction(double alpha, int depth) {
  if (depth < 0) fail(ErrorKind::PreconditionFailed, "negative depth");
  std::vector<long> cf;
  long double x = alpha - std::floor(alpha);
  for (int i = 0; i < depth; ++i) {
    if (x < 1e-12L) fail(ErrorKind::RationalDetected, "remainder vanished after " + std::to_string(i) + " quotients");
    x = 1.0L / x;
    const long double a = std::floor(x);
    cf.push_back(static_cast<long>(a));
    x -= a;
  }
  return cf;
}

std::vector<long> convergent_denominators(std::span<const long> cf) {
  std::vector<long> q;
  long prev = 0, cur = 1;  // q_{-1} = 0, q_0 = 1
  for (long a : cf) {
    const long next = a * cur + prev;
    prev = cur;
    cur = next;
    q.push_back(cur);
  }
  return q;
}

DiophantineNumber certify(double alpha, double q, int K) {
  if (K < 1) fail(ErrorKind::PreconditionFailed, "certify needs K >= 1");
  DiophantineNumber d;
  d.alpha = alpha;
  d.q = q;
  d.cutoff_K = K;
  d.gamma = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= K; ++k)
    d.gamma = std::min(d.gamma, std::pow(double(k), q) * dist_to_integer(k * alpha));
  if (d.gamma < 1e-12) fail(ErrorKind::GammaUnderflow, "alpha is too close to a rational at this cutoff");
  // Keep the partial quotients that are meaningful in double precision.
  long double x = alpha - std::floor(alpha);
  for (int i = 0; i < 24 && x > 1e-9L; ++i) {
    x = 1.0L / x;
    const long double a = std::floor(x);
    d.cf.push_back(static_cast<long>(a));
    x -= a;
  }
  return d;
}

RotationEstimate rotation_number(std::span<const double> orbit, RotationEstimator mode) {
  if (orbit.size() < 100) fail(ErrorKind::TooShort, "rotation_number needs at least 100 iterates");
  const size_t steps = orbit.size() - 1;
  std::vector<double> inc(steps);
  for (size_t n = 0; n < steps; ++n) inc[n] = orbit[n + 1] - orbit[n];

  if (mode == RotationEstimator::Birkhoff) {
    auto weighted = [&](size_t len) {
      std::vector<double> w(len);
      double total = 0.0;
      for (size_t n = 0; n < len; ++n) {
        const double t = (n + 1.0) / (len + 1.0);
        w[n] = std::exp(-1.0 / (t * (1.0 - t)));
        total += w[n];
      }
      return kernels::weighted_sum(w, std::span<const double>(inc).first(len)) / total / kTwoPi;
    };
    const double full = weighted(steps);
    const double half = weighted(steps / 2);
    return {full, std::abs(full - half)};
  }

  auto plain = [&](size_t len) { return (orbit[len] - orbit[0]) / (kTwoPi * double(len)); };
  const double whole = plain(steps);
  const double half = plain(steps / 2);
  const double extrapolated = 2.0 * whole - half;
  return {extrapolated, std::abs(extrapolated - whole)};
}

}  // namespace circle
