#include <cmath>

#include "circle/kernels.hpp"

namespace circle::kernels {
namespace {

void trig_series_scalar(const double* a, const double* b, std::size_t n, const double* cos_t,
                        const double* sin_t, double* out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    const double two_c = 2.0 * cos_t[i];
    // Clenshaw recurrence, run jointly for the cosine and sine parts.
    double u1 = 0.0, u2 = 0.0, v1 = 0.0, v2 = 0.0;
    for (std::size_t k = n; k >= 1; --k) {
      const double u0 = a[k] + two_c * u1 - u2;
      const double v0 = b[k] + two_c * v1 - v2;
      u2 = u1;
      u1 = u0;
      v2 = v1;
      v1 = v0;
    }
    out[i] = a[0] + u1 * cos_t[i] - u2 + v1 * sin_t[i];
  }
}

double max_abs_diff_scalar(const double* x, const double* y, std::size_t count) {
  double m = 0.0;
  for (std::size_t i = 0; i < count; ++i) m = std::fmax(m, std::fabs(x[i] - y[i]));
  return m;
}

double max_periodic_slope_scalar(const double* v, std::size_t count, double h) {
  if (count < 2) return 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < count; ++i) m = std::fmax(m, std::fabs(v[i + 1] - v[i]));
  m = std::fmax(m, std::fabs(v[0] - v[count - 1]));
  return m / h;
}

double weighted_sum_scalar(const double* w, const double* x, std::size_t count) {
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) s += w[i] * x[i];
  return s;
}

constexpr Table kScalar{trig_series_scalar, max_abs_diff_scalar, max_periodic_slope_scalar,
                        weighted_sum_scalar};

}  // namespace

const Table& scalar_table() { return kScalar; }

}  // namespace circle::kernels
