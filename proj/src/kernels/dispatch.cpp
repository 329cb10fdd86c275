#include <atomic>
#include <cmath>
#include <vector>
#include <cstdlib>
#include <string>

#include "circle/error.hpp"
#include "circle/kernels.hpp"

namespace circle::kernels {
namespace {

Backend detect() {
  if (const char* env = std::getenv("CIRCLE_SIMD"); env && std::string(env) == "scalar")
    return Backend::Scalar;
  return cpu_has_avx2() && avx2_table() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (backend == Backend::Avx2 && !(cpu_has_avx2() && avx2_table()))
    fail(ErrorKind::PreconditionFailed, "AVX2 kernels unavailable on this CPU/build");
  current().store(backend, std::memory_order_relaxed);
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

const Table& active() {
  return active_backend() == Backend::Avx2 ? *avx2_table() : scalar_table();
}

void eval_trig_series(std::span<const double> a, std::span<const double> b,
                      std::span<const double> theta, std::span<double> out) {
  if (a.size() != b.size() || a.empty() || theta.size() != out.size())
    fail(ErrorKind::PreconditionFailed, "eval_trig_series: inconsistent sizes");
  std::vector<double> c(theta.size()), s(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    c[i] = std::cos(theta[i]);
    s[i] = std::sin(theta[i]);
  }
  active().trig_series(a.data(), b.data(), a.size() - 1, c.data(), s.data(), out.data(),
                       out.size());
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorKind::PreconditionFailed, "max_abs_diff: size mismatch");
  return active().max_abs_diff(x.data(), y.data(), x.size());
}

double max_periodic_slope(std::span<const double> v, double h) {
  return active().max_periodic_slope(v.data(), v.size(), h);
}

double weighted_sum(std::span<const double> w, std::span<const double> x) {
  if (w.size() != x.size()) fail(ErrorKind::PreconditionFailed, "weighted_sum: size mismatch");
  return active().weighted_sum(w.data(), x.data(), w.size());
}

}  // namespace circle::kernels
