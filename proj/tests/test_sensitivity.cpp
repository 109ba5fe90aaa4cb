#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tdse/sensitivity.hpp"

using namespace tdse;

namespace {

FamilySystem anharmonic(const SpatialGrid& g) {
  return FamilySystem(std::make_shared<const PotentialFamily>(builtin_family("anharmonic_rho")), g);
}

PropagatorConfig config(double dt, double T) {
  PropagatorConfig c;
  c.dt = dt;
  c.T = T;
  return c;
}

}  // namespace

TEST_CASE("trajectories sample every record_every steps") {
  const auto g = make_grid(1, 8.0, 64);
  const auto sys = anharmonic(g);
  auto cfg = config(1e-2, 0.1);
  cfg.record_every = 3;
  const double c[] = {0.5};
  const auto tr = trajectory(cfg, *sys.flow(1.0), gaussian(g, c, 1.0));
  REQUIRE(tr.times.size() == 5);  // 0, 3, 6, 9, 10
  CHECK(tr.times[1] == doctest::Approx(0.03));
  CHECK(tr.times.back() == doctest::Approx(0.1));
  CHECK(max_distance(sys, 0, tr, tr) == 0.0);
  CHECK(max_norm(sys, 0, tr) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("quotient arguments are checked") {
  const auto g = make_grid(1, 8.0, 64);
  const auto sys = anharmonic(g);
  const double c[] = {0.5};
  const auto u0 = gaussian(g, c, 1.0);
  CHECK_THROWS(difference_quotient(sys, config(1e-2, 0.1), u0, 1.0, 0.0, 0));
  CHECK_THROWS(difference_quotient(sys, config(1e-2, 0.1), u0, 3.9, 0.5, 0));
  CHECK_THROWS(difference_quotient(sys, config(1e-2, 0.1), u0, 9.0, 0.1, 0));
}

TEST_CASE("the variational solution is the rho derivative of the discrete flow") {
  const auto g = make_grid(1, 8.0, 64);
  const auto sys = anharmonic(g);
  const auto cfg = config(1e-2, 0.3);
  const double c[] = {0.5};
  const auto u0 = gaussian(g, c, 1.0);
  const auto var = solve_variational(sys, cfg, u0, 1.0, 0);
  CHECK(var.max_norm > 1e-3);
  // Independent finite difference of two plain runs.
  const double h = 1e-4;
  const auto up = trajectory(cfg, *sys.flow(1.0 + h), u0);
  const auto dn = trajectory(cfg, *sys.flow(1.0 - h), u0);
  WaveFunction fd(g);
  for (std::size_t j = 0; j < fd.size(); ++j)
    fd.values[j] = (up.states.back().values[j] - dn.states.back().values[j]) / (2 * h);
  CHECK(l2_distance(fd, var.w.states.back()) < 1e-6 * l2_norm(fd));
}

TEST_CASE("central quotients converge faster than forward ones") {
  const auto g = make_grid(1, 8.0, 64);
  const auto sys = anharmonic(g);
  const auto cfg = config(2e-2, 0.2);
  const double c[] = {0.5};
  const auto u0 = gaussian(g, c, 1.0);
  const double taus[] = {1e-1, 1e-2};
  const auto var = solve_variational(sys, cfg, u0, 1.0, 0);
  const auto fwd = discrepancy_curve(sys, cfg, u0, 1.0, taus, 0, QuotientKind::forward, var);
  const auto cen = discrepancy_curve(sys, cfg, u0, 1.0, taus, 0, QuotientKind::central, var);
  CHECK(fwd.order == doctest::Approx(1.0).epsilon(0.15));
  CHECK(cen.order > 1.8);
  CHECK(cen.points[1].discrepancy < fwd.points[1].discrepancy);
  CHECK(fwd.quotient_sup <= 2.0 * fwd.variational_max_norm);
}

TEST_CASE("rho-independent families have vanishing sensitivity") {
  const auto g = make_grid(1, 8.0, 64);
  FamilySystem sys(std::make_shared<const PotentialFamily>(builtin_family("harmonic")), g);
  CHECK_FALSE(sys.depends_on_rho());
  const double c[] = {0.5};
  const auto var = solve_variational(sys, config(1e-2, 0.1), gaussian(g, c, 1.0), 0.0, 0);
  CHECK(var.max_norm < 1e-14);
}

TEST_CASE("the continuity modulus decreases with the parameter step") {
  const auto g = make_grid(1, 8.0, 64);
  const auto sys = anharmonic(g);
  const double c[] = {0.5};
  const double deltas[] = {1e-1, 1e-2, 1e-3};
  const auto m = continuity_modulus(sys, config(2e-2, 0.2), gaussian(g, c, 1.0), 1.0, deltas, 0);
  REQUIRE(m.points.size() == 3);
  CHECK(m.decreasing);
  CHECK(m.order == doctest::Approx(1.0).epsilon(0.1));
}
