#include "tdse/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace tdse::fft {
namespace {

// FFTW's planner is not thread-safe; execution through fftw_execute_dft on
// other arrays is, as long as the plan was made FFTW_UNALIGNED.
class PlanCache {
 public:
  fftw_plan get(int n, int howmany, int stride, int dist, int sign) {
    const Key key{n, howmany, stride, dist, sign};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const int total = (howmany - 1) * dist + (n - 1) * stride + 1;
    auto* scratch = fftw_alloc_complex(static_cast<std::size_t>(total));
    fftw_plan plan = fftw_plan_many_dft(1, &n, howmany, scratch, nullptr, stride,
                                        dist, scratch, nullptr, stride, dist,
                                        sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  using Key = std::tuple<int, int, int, int, int>;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void run_axis(const SpatialGrid& grid, std::span<cplx> data, int axis,
              int sign) {
  if (data.size() != grid.size()) throw GridMismatch("fft: length mismatch");
  const int n = grid.points();
  int howmany = 1, stride = 1, dist = n;
  if (grid.dim() == 2) {
    howmany = n;
    if (axis == 0) {
      stride = n;
      dist = 1;
    } else {
      stride = 1;
      dist = n;
    }
  }
  fftw_plan plan = cache().get(n, howmany, stride, dist, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

void forward_axis(const SpatialGrid& grid, std::span<cplx> data, int axis) {
  run_axis(grid, data, axis, FFTW_FORWARD);
}

void backward_axis(const SpatialGrid& grid, std::span<cplx> data, int axis) {
  run_axis(grid, data, axis, FFTW_BACKWARD);
}

void forward(const SpatialGrid& grid, std::span<cplx> data) {
  for (int a = 0; a < grid.dim(); ++a) forward_axis(grid, data, a);
}

void backward(const SpatialGrid& grid, std::span<cplx> data) {
  for (int a = 0; a < grid.dim(); ++a) backward_axis(grid, data, a);
}

}  // namespace tdse::fft
