#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tdse/propagator.hpp"

using namespace tdse;

namespace {

HamiltonianHandle handle(const PotentialFamily& fam, const SpatialGrid& g, double rho = 0.0) {
  return HamiltonianHandle(std::make_shared<const PotentialFamily>(fam), rho, g);
}

PropagatorConfig config(Scheme s, double dt, double T) {
  PropagatorConfig c;
  c.scheme = s;
  c.dt = dt;
  c.T = T;
  return c;
}

}  // namespace

TEST_CASE("step counts are validated") {
  CHECK(step_count(config(Scheme::crank_nicolson, 1e-3, 1.0)) == 1000);
  CHECK_THROWS(step_count(config(Scheme::crank_nicolson, 0.0, 1.0)));
  CHECK_THROWS(step_count(config(Scheme::crank_nicolson, 0.3, 1.0)));
  auto c = config(Scheme::crank_nicolson, 0.1, 1.0);
  c.solver_tol = -1;
  CHECK_THROWS(step_count(c));
}

TEST_CASE("Crank–Nicolson multiplies eigenvectors by the Cayley factor") {
  const auto g = make_grid(1, 5.0, 32);
  const auto h = handle(oracle::free_family(), g);
  const auto cfg = config(Scheme::crank_nicolson, 0.05, 0.5);
  for (int mode : {1, 5}) {
    const auto f = plane_wave(g, 0, mode);
    const double lam = std::pow(mode * g.dxi(), 2) / 2, tau = cfg.dt / 2;
    const cplx cayley = std::pow((1.0 - cplx(0, tau * lam)) / (1.0 + cplx(0, tau * lam)), 10);
    const auto run = propagate(cfg, h, f);
    for (std::size_t j = 0; j < f.size(); ++j)
      CHECK(std::abs(run.final_state.values[j] - cayley * f.values[j]) < 1e-10);
  }
}

TEST_CASE("Lanczos reproduces the exact eigenphase") {
  const auto g = make_grid(1, 5.0, 32);
  const auto h = handle(oracle::free_family(), g);
  const auto f = plane_wave(g, 0, 3);
  const double lam = std::pow(3 * g.dxi(), 2) / 2;
  const auto run = propagate(config(Scheme::lanczos, 0.1, 1.0), h, f);
  for (std::size_t j = 0; j < f.size(); ++j)
    CHECK(std::abs(run.final_state.values[j] - std::polar(1.0, -lam) * f.values[j]) < 1e-9);
}

TEST_CASE("harmonic ground state acquires the phase e^{-it/2}") {
  const auto g = make_grid(1, 10.0, 256);
  const auto h = handle(builtin_family("harmonic"), g);
  const double c[] = {0.0};
  const auto u0 = gaussian(g, c, 1.0);
  for (Scheme s : {Scheme::crank_nicolson, Scheme::lanczos}) {
    const auto run = propagate(config(s, 1e-2, 0.5), h, u0);
    WaveFunction exact = u0;
    for (auto& v : exact.values) v *= std::polar(1.0, -0.25);
    CHECK(l2_distance(run.final_state, exact) < 1e-5);
    CHECK(run.max_norm_drift() < 1e-10);
  }
}

TEST_CASE("one step forward and one back returns the state") {
  const auto g = make_grid(1, 8.0, 128);
  const auto h = handle(builtin_family("confined_quartic"), g);
  const double c[] = {0.5};
  const auto u0 = gaussian(g, c, 0.8);
  for (Scheme s : {Scheme::crank_nicolson, Scheme::lanczos}) {
    const auto cfg = config(s, 1e-2, 1e-2);
    CVec a(u0.size()), b(u0.size());
    step(cfg, h, 0.3, 1e-2, u0.values, a);
    step(cfg, h, 0.31, -1e-2, a, b);
    CHECK(oracle::distance(b, u0.values) < 1e-9 * oracle::norm(u0.values));
  }
}

TEST_CASE("propagation is linear") {
  std::mt19937_64 rng(41);
  const auto g = make_grid(1, 8.0, 64);
  const auto h = handle(builtin_family("confined_quartic"), g);
  const double c1[] = {0.5}, c2[] = {-1.0};
  const auto f = gaussian(g, c1, 0.8), u = gaussian(g, c2, 1.0);
  const cplx alpha(0.3, -1.2);
  WaveFunction mix(g);
  for (std::size_t j = 0; j < mix.size(); ++j) mix.values[j] = f.values[j] + alpha * u.values[j];
  const auto cfg = config(Scheme::crank_nicolson, 1e-2, 0.1);
  const auto rf = propagate(cfg, h, f), ru = propagate(cfg, h, u), rm = propagate(cfg, h, mix);
  double err = 0;
  for (std::size_t j = 0; j < mix.size(); ++j)
    err = std::max(err, std::abs(rm.final_state.values[j] - rf.final_state.values[j] -
                                 alpha * ru.final_state.values[j]));
  CHECK(err < 1e-10);
}

TEST_CASE("manufactured inhomogeneous solution converges at second order") {
  const auto g = make_grid(1, 5.0, 32);
  const auto h = handle(oracle::free_family(), g);
  const auto phi = plane_wave(g, 0, 2);
  const double lam = std::pow(2 * g.dxi(), 2) / 2, T = 1.0;
  // i c' = lam c + 1, c(0) = 0.
  const cplx c_exact = (std::polar(1.0, -lam * T) - 1.0) / lam;
  Source src = [&](double, std::span<cplx> out) {
    std::copy(phi.values.begin(), phi.values.end(), out.begin());
  };
  double errs[2];
  int i = 0;
  for (double dt : {0.02, 0.01}) {
    const auto run = propagate_inhomogeneous(config(Scheme::crank_nicolson, dt, T), h, WaveFunction(g), src);
    double e = 0;
    for (std::size_t j = 0; j < phi.size(); ++j)
      e = std::max(e, std::abs(run.final_state.values[j] - c_exact * phi.values[j]));
    errs[i++] = e;
  }
  CHECK(errs[0] < 1e-3);
  CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("run records and saved states") {
  const auto g = make_grid(1, 8.0, 64);
  const auto h = handle(builtin_family("confined_quartic"), g);
  const double c[] = {0.0};
  auto cfg = config(Scheme::crank_nicolson, 1e-2, 0.2);
  cfg.record_every = 5;
  cfg.save_every = 10;
  const int orders[] = {1, 2};
  const auto run = propagate(cfg, h, gaussian(g, c, 1.0), orders);
  CHECK(run.steps == 20);
  CHECK(run.records.size() == 5);
  CHECK(run.states.size() == 3);
  CHECK(run.save_times.back() == doctest::Approx(0.2));
  REQUIRE(run.norm_labels.size() == 2);
  CHECK(run.norm_labels[0] == "norm_1");
  CHECK(run.records.back().weighted.size() == 2);
  CHECK(run.max_ratio(0) >= 1.0);
  CHECK_FALSE(run.boundary_flag);
  const auto fit = energy_estimate_check(run, 1);
  CHECK(fit.finite);
  CHECK(fit.max_ratio == doctest::Approx(run.max_ratio(1)));
}

TEST_CASE("energy fit comparison") {
  EnergyFit a{"norm_1", 0.3, 1.10, true}, b{"norm_1", 0.31, 1.12, true}, c{"norm_1", 5.0, 3.0, true};
  CHECK(compare_energy_fits(a, b).stable);
  CHECK_FALSE(compare_energy_fits(a, c).stable);
  CHECK_FALSE(compare_energy_fits(a, EnergyFit{"norm_1", 0, 0, false}).stable);
}

TEST_CASE("the regularized flow conserves the norm and tracks the true flow") {
  const auto g = make_grid(1, 8.0, 64);
  const auto h = handle(builtin_family("harmonic"), g);
  const double c[] = {0.5};
  const auto u0 = gaussian(g, c, 1.0);
  auto cfg = config(Scheme::crank_nicolson, 1e-2, 0.1);
  const auto exact = propagate(cfg, h, u0);
  double prev = 1e300;
  for (double eps : {0.5, 0.125, 0.03125}) {
    cfg.cutoff = CutoffSpec{eps, 1.0};
    const auto run = propagate(cfg, h, u0);
    CHECK(run.max_norm_drift() < 1e-9);
    const double d = l2_distance(run.final_state, exact.final_state);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("grid mismatch between state and generator is an error") {
  const auto h = handle(builtin_family("harmonic"), make_grid(1, 8.0, 64));
  CHECK_THROWS(propagate(config(Scheme::crank_nicolson, 0.1, 0.1), h, WaveFunction(make_grid(1, 8.0, 32))));
}
