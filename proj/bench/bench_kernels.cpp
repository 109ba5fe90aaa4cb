#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "tdse/kernels.hpp"

using namespace tdse;

namespace {

CVec random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVec v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

double seconds(const std::function<void()>& f, int reps) {
  f();
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

double max_diff(const CVec& a, const CVec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void report(const char* name, double ts, double tp, double diff) {
  std::printf("%-28s %12.3e %12.3e %8.2fx   max|diff| %.2e\n", name, ts, tp, ts / tp, diff);
}

}  // namespace

int main() {
  std::mt19937_64 rng(7);
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-28s %12s %12s %9s\n", "kernel", "serial [s]", "omp [s]", "speedup");

  for (auto [n, dim] : {std::pair{128, 1}, std::pair{512, 1}, std::pair{32, 2}}) {
    const std::size_t m = dim == 1 ? n : std::size_t(n) * n;
    const CVec sym = random_vector(m * m, rng), f = random_vector(m, rng);
    CVec a(m), b(m);
    const double ts = seconds([&] { kernels::serial::kn_apply(n, dim, sym, f, a); }, 5);
    const double tp = seconds([&] { kernels::omp::kn_apply(n, dim, sym, f, b); }, 5);
    char name[64];
    std::snprintf(name, sizeof name, "kn_apply N=%d d=%d", n, dim);
    report(name, ts, tp, max_diff(a, b));
    const double us = seconds([&] { kernels::serial::kn_adjoint_gather(n, dim, sym, f, a); }, 5);
    const double up = seconds([&] { kernels::omp::kn_adjoint_gather(n, dim, sym, f, b); }, 5);
    std::snprintf(name, sizeof name, "kn_adjoint N=%d d=%d", n, dim);
    report(name, us, up, max_diff(a, b));
  }

  const std::size_t n = 1 << 20;
  const CVec x = random_vector(n, rng), y = random_vector(n, rng);
  RVec w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::abs(x[i]);
  cplx ds, dp;
  double ns = 0, np = 0;
  CVec ms(n), mp(n);
  report("dot n=2^20", seconds([&] { ds = kernels::serial::dot(x, y); }, 20),
         seconds([&] { dp = kernels::omp::dot(x, y); }, 20), std::abs(ds - dp));
  report("norm_sq n=2^20", seconds([&] { ns = kernels::serial::norm_sq(x); }, 20),
         seconds([&] { np = kernels::omp::norm_sq(x); }, 20), std::abs(ns - np));
  report("multiply n=2^20", seconds([&] { kernels::serial::multiply(w, x, ms); }, 20),
         seconds([&] { kernels::omp::multiply(w, x, mp); }, 20), max_diff(ms, mp));
}
