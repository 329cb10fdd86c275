#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops shared by the solvers. Each kernel has a scalar
// reference implementation and an AVX2/FMA variant; the variant is chosen
// once at startup from the running CPU (override with CIRCLE_SIMD=scalar).

namespace circle::kernels {

enum class Backend { Scalar, Avx2 };

struct Table {
  /// out[i] = a[0] + sum_{k=1}^{n} a[k] cos(k t_i) + b[k] sin(k t_i),
  /// with cos(t_i), sin(t_i) supplied by the caller. a and b hold n+1 entries.
  void (*trig_series)(const double* a, const double* b, std::size_t n, const double* cos_t,
                      const double* sin_t, double* out, std::size_t count);
  double (*max_abs_diff)(const double* x, const double* y, std::size_t count);
  /// max_i |v[i+1] - v[i]| / h over a periodic sequence (wraps last to first).
  double (*max_periodic_slope)(const double* v, std::size_t count, double h);
  double (*weighted_sum)(const double* w, const double* x, std::size_t count);
};

const Table& scalar_table();
/// Null when the AVX2 translation unit was not built for this target.
const Table* avx2_table();

bool cpu_has_avx2();
Backend active_backend();
void set_backend(Backend backend);
std::string_view backend_name(Backend backend);
const Table& active();

// Convenience wrappers over the active table.
void eval_trig_series(std::span<const double> a, std::span<const double> b,
                      std::span<const double> theta, std::span<double> out);
double max_abs_diff(std::span<const double> x, std::span<const double> y);
double max_periodic_slope(std::span<const double> v, double h);
double weighted_sum(std::span<const double> w, std::span<const double> x);

}  // namespace circle::kernels
