#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tdse/fft.hpp"
#include "tdse/kernels.hpp"

using namespace tdse;

TEST_CASE("grid rejects bad shapes") {
  CHECK_THROWS_AS(make_grid(1, 10.0, 63), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 10.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, -1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(3, 1.0, 8), std::invalid_argument);
  CHECK_NOTHROW(make_grid(2, 5.0, 16));
}

TEST_CASE("nodes and dual frequencies") {
  const auto g = make_grid(1, 10.0, 64);
  CHECK(g.node(0) == doctest::Approx(-10.0));
  CHECK(g.dx() == doctest::Approx(20.0 / 64));
  CHECK(g.frequency(1) == doctest::Approx(M_PI / 10.0));
  CHECK(g.frequency(32) == doctest::Approx(-g.max_frequency()));
  const auto g2 = make_grid(2, 3.0, 8);
  CHECK(g2.size() == 64);
  CHECK(g2.coordinate(1 * 8 + 5, 0) == doctest::Approx(g2.node(1)));
  CHECK(g2.coordinate(1 * 8 + 5, 1) == doctest::Approx(g2.node(5)));
}

TEST_CASE("gaussian has unit norm and the analytic derivative") {
  const auto g = make_grid(1, 12.0, 256);
  const double c[] = {0.7};
  const auto f = gaussian(g, c, 1.3);
  CHECK(l2_norm(f) == doctest::Approx(1.0).epsilon(1e-12));
  const auto d1 = spectral_derivative(f, 0, 1);
  const auto d2 = spectral_derivative(f, 0, 2);
  double e1 = 0, e2 = 0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double y = g.node(int(j)) - 0.7, w2 = 1.3 * 1.3;
    e1 = std::max(e1, std::abs(d1.values[j] - f.values[j] * (-y / w2)));
    e2 = std::max(e2, std::abs(d2.values[j] - f.values[j] * (y * y / (w2 * w2) - 1.0 / w2)));
  }
  CHECK(e1 < 1e-10);
  CHECK(e2 < 1e-10);
}

TEST_CASE("2d gaussian norm and inner product") {
  const auto g = make_grid(2, 8.0, 64);
  const double c[] = {1.0, -0.5};
  const double k[] = {0.5, 0.0};
  const auto f = gaussian(g, c, 1.0, k);
  CHECK(l2_norm(f) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(l2_inner_product(f, f) - 1.0) < 1e-12);
  CHECK(l2_distance(f, f) == 0.0);
}

TEST_CASE("plane waves diagonalize the spectral derivative") {
  const auto g = make_grid(1, 5.0, 32);
  const auto f = plane_wave(g, 0, 3);
  const auto d = spectral_derivative(f, 0, 1);
  for (std::size_t j = 0; j < f.size(); ++j)
    CHECK(std::abs(d.values[j] - cplx(0, 3 * g.dxi()) * f.values[j]) < 1e-11);
}

TEST_CASE("fft round trip scales by N^d and matches the direct DFT") {
  std::mt19937_64 rng(3);
  const auto g = make_grid(2, 4.0, 16);
  CVec f = oracle::random_vector(g.size(), rng), h = f;
  fft::forward(g, h);
  for (std::size_t k : {std::size_t(0), std::size_t(17), std::size_t(200)}) {
    cplx direct = 0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double arg = -2 * M_PI *
          (g.axis_index(j, 0) * g.axis_index(k, 0) + g.axis_index(j, 1) * g.axis_index(k, 1)) / 16.0;
      direct += f[j] * std::polar(1.0, arg);
    }
    CHECK(std::abs(direct - h[k]) < 1e-10);
  }
  fft::backward(g, h);
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(h[j] / 256.0 - f[j]) < 1e-12);
}

TEST_CASE("grid mismatch is reported") {
  const auto a = make_grid(1, 5.0, 32), b = make_grid(1, 5.0, 64);
  CHECK_THROWS_AS(require_same_grid(a, b), GridMismatch);
  CHECK_THROWS_AS(l2_distance(WaveFunction(a), WaveFunction(b)), GridMismatch);
}

TEST_CASE("boundary mass sees only the outer shell") {
  const auto g = make_grid(1, 10.0, 128);
  const double inner[] = {0.0}, outer[] = {9.5};
  CHECK(boundary_mass(gaussian(g, inner, 0.5)) < 1e-30);
  CHECK(boundary_mass(gaussian(g, outer, 0.3)) > 0.5);
}

TEST_CASE("omp kernels agree with the serial reference") {
  std::mt19937_64 rng(11);
  for (auto [n, dim] : {std::pair{32, 1}, std::pair{8, 2}}) {
    const std::size_t m = dim == 1 ? n : std::size_t(n) * n;
    const CVec sym = oracle::random_vector(m * m, rng), f = oracle::random_vector(m, rng);
    CVec a(m), b(m);
    kernels::serial::kn_apply(n, dim, sym, f, a);
    kernels::omp::kn_apply(n, dim, sym, f, b);
    CHECK(oracle::distance(a, b) < 1e-12 * oracle::norm(a));
    kernels::serial::kn_adjoint_gather(n, dim, sym, f, a);
    kernels::omp::kn_adjoint_gather(n, dim, sym, f, b);
    CHECK(oracle::distance(a, b) < 1e-12 * oracle::norm(a));
  }
  const CVec x = oracle::random_vector(5000, rng), y = oracle::random_vector(5000, rng);
  CHECK(std::abs(kernels::serial::dot(x, y) - kernels::omp::dot(x, y)) < 1e-9);
  CHECK(kernels::serial::norm_sq(x) == doctest::Approx(kernels::omp::norm_sq(x)).epsilon(1e-14));
  RVec w(x.size(), 0.5);
  CVec ms(x.size()), mp(x.size());
  kernels::serial::multiply(w, x, ms);
  kernels::omp::multiply(w, x, mp);
  CHECK(ms == mp);
}

TEST_CASE("kn_apply matches the explicit double sum") {
  std::mt19937_64 rng(5);
  const int n = 12;
  const CVec sym = oracle::random_vector(n * n, rng), f = oracle::random_vector(n, rng);
  CVec out(n);
  kernels::serial::kn_apply(n, 1, sym, f, out);
  for (int j = 0; j < n; ++j) {
    cplx s = 0;
    for (int k = 0; k < n; ++k) s += std::polar(1.0, 2 * M_PI * j * k / n) * sym[j * n + k] * f[k];
    CHECK(std::abs(s - out[j]) < 1e-12);
  }
}
