#include "circle/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

#include <cmath>

namespace circle::kernels {
namespace {

void trig_series_avx2(const double* a, const double* b, std::size_t n, const double* cos_t,
                      const double* sin_t, double* out, std::size_t count) {
  std::size_t i = 0;
  const __m256d a0 = _mm256_set1_pd(a[0]);
  for (; i + 4 <= count; i += 4) {
    const __m256d c = _mm256_loadu_pd(cos_t + i);
    const __m256d s = _mm256_loadu_pd(sin_t + i);
    const __m256d two_c = _mm256_add_pd(c, c);
    __m256d u1 = _mm256_setzero_pd(), u2 = _mm256_setzero_pd();
    __m256d v1 = _mm256_setzero_pd(), v2 = _mm256_setzero_pd();
    for (std::size_t k = n; k >= 1; --k) {
      const __m256d u0 = _mm256_fmadd_pd(two_c, u1, _mm256_sub_pd(_mm256_set1_pd(a[k]), u2));
      const __m256d v0 = _mm256_fmadd_pd(two_c, v1, _mm256_sub_pd(_mm256_set1_pd(b[k]), v2));
      u2 = u1;
      u1 = u0;
      v2 = v1;
      v1 = v0;
    }
    __m256d r = _mm256_sub_pd(a0, u2);
    r = _mm256_fmadd_pd(u1, c, r);
    r = _mm256_fmadd_pd(v1, s, r);
    _mm256_storeu_pd(out + i, r);
  }
  if (i < count) scalar_table().trig_series(a, b, n, cos_t + i, sin_t + i, out + i, count - i);
}

inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

inline double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
}

double max_abs_diff_avx2(const double* x, const double* y, std::size_t count) {
  std::size_t i = 0;
  __m256d m = _mm256_setzero_pd();
  for (; i + 4 <= count; i += 4)
    m = _mm256_max_pd(m, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i))));
  double r = hmax(m);
  for (; i < count; ++i) r = std::fmax(r, std::fabs(x[i] - y[i]));
  return r;
}

double max_periodic_slope_avx2(const double* v, std::size_t count, double h) {
  if (count < 2) return 0.0;
  std::size_t i = 0;
  __m256d m = _mm256_setzero_pd();
  for (; i + 5 <= count; i += 4)
    m = _mm256_max_pd(m, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(v + i + 1), _mm256_loadu_pd(v + i))));
  double r = hmax(m);
  for (; i + 1 < count; ++i) r = std::fmax(r, std::fabs(v[i + 1] - v[i]));
  r = std::fmax(r, std::fabs(v[0] - v[count - 1]));
  return r / h;
}

double weighted_sum_avx2(const double* w, const double* x, std::size_t count) {
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= count; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i), acc);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < count; ++i) s += w[i] * x[i];
  return s;
}

constexpr Table kAvx2{trig_series_avx2, max_abs_diff_avx2, max_periodic_slope_avx2,
                      weighted_sum_avx2};

}  // namespace

const Table* avx2_table() { return &kAvx2; }

}  // namespace circle::kernels

#else

namespace circle::kernels {
const Table* avx2_table() { return nullptr; }
}  // namespace circle::kernels

#endif
