#include "circle/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "circle/error.hpp"

namespace circle::fft {
namespace {

// FFTW's planner is not re-entrant; plans are created once per (size, sign)
// under a lock and then executed through the thread-safe new-array API.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(static_cast<size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void run(std::span<const cd> in, std::span<cd> out, int sign) {
  if (in.size() != out.size()) fail(ErrorKind::PreconditionFailed, "fft size mismatch");
  if (in.empty()) return;
  const int n = static_cast<int>(in.size());
  fftw_plan plan = cache().get(n, sign);
  // FFTW may overwrite its input for some plans, so execute from a copy.
  std::vector<cd> buffer(in.begin(), in.end());
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buffer.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void forward(std::span<const cd> in, std::span<cd> out) { run(in, out, FFTW_FORWARD); }
void backward(std::span<const cd> in, std::span<cd> out) { run(in, out, FFTW_BACKWARD); }

}  // namespace circle::fft
