#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tdse/operators.hpp"

using namespace tdse;

namespace {

std::shared_ptr<const PotentialFamily> family(const std::string& name) {
  return std::make_shared<const PotentialFamily>(builtin_family(name));
}

cplx inner(const CVec& a, const CVec& b) {
  cplx s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

}  // namespace

TEST_CASE("Hamiltonian matches the dense (p - A)^2/2m + V oracle") {
  std::mt19937_64 rng(31);
  struct Case {
    std::string fam;
    SpatialGrid grid;
    double t;
  };
  for (const Case& c : {Case{"confined_quartic", make_grid(1, 6.0, 32), 0.7},
                        Case{"harmonic", make_grid(1, 6.0, 32), 0.0},
                        Case{"magnetic_quartic_2d", make_grid(2, 3.0, 8), 0.0}}) {
    CAPTURE(c.fam);
    const auto fam = family(c.fam);
    const HamiltonianHandle h(fam, 0.0, c.grid);
    const auto dense = oracle::hamiltonian(*fam, c.t, 0.0, c.grid);
    for (int r = 0; r < 5; ++r) {
      const WaveFunction f(c.grid, oracle::random_vector(c.grid.size(), rng));
      const auto hf = apply_hamiltonian(h, c.t, f);
      CHECK(oracle::distance(hf.values, oracle::apply(dense, f.values)) <
            1e-10 * oracle::norm(hf.values));
    }
  }
}

TEST_CASE("the frozen Hamiltonian is Hermitian") {
  std::mt19937_64 rng(32);
  const auto g = make_grid(1, 8.0, 64);
  const HamiltonianHandle h(family("confined_quartic"), 0.0, g);
  const auto op = h.frozen(1.3);
  const CVec f = oracle::random_vector(g.size(), rng), u = oracle::random_vector(g.size(), rng);
  CVec hf(g.size()), hu(g.size());
  op->apply(f, hf);
  op->apply(u, hu);
  CHECK(std::abs(inner(hf, u) - inner(f, hu)) < 1e-10 * std::abs(inner(hf, u)));
}

TEST_CASE("constant vector potential shifts plane-wave energies") {
  const auto g = make_grid(1, 5.0, 32);
  const auto fam = std::make_shared<const PotentialFamily>(
      FamilyDefinition{"shift", 1, "0", {"0.7"}, 0.0, 1.0, 2.0, {-1.0, 1.0}});
  const HamiltonianHandle h(fam, 0.0, g);
  for (int mode : {-3, 0, 4}) {
    const auto f = plane_wave(g, 0, mode);
    const auto hf = apply_hamiltonian(h, 0.0, f);
    const double k = mode * g.dxi(), e = (k - 0.7) * (k - 0.7) / (2.0 * 2.0);
    for (std::size_t j = 0; j < f.size(); ++j) CHECK(std::abs(hf.values[j] - e * f.values[j]) < 1e-11);
  }
}

TEST_CASE("rho derivative of the anharmonic family is x^4/4") {
  const auto g = make_grid(1, 4.0, 32);
  const HamiltonianHandle h(family("anharmonic_rho"), 1.0, g);
  const double c[] = {0.3};
  const auto f = gaussian(g, c, 1.0);
  WaveFunction out(g);
  h.rho_derivative(0.0)->apply(f.values, out.values);
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double x = g.coordinate(j, 0);
    CHECK(std::abs(out.values[j] - x * x * x * x / 4 * f.values[j]) < 1e-12);
  }
}

TEST_CASE("frozen maps carry the scalar diagonal") {
  const auto g = make_grid(1, 4.0, 16);
  const HamiltonianHandle h(family("harmonic"), 0.0, g);
  const auto fm = h.frozen_map(0.0);
  REQUIRE(fm.diagonal.size() == g.size());
  CHECK(fm.diagonal[3] == doctest::Approx(g.node(3) * g.node(3) / 2));
}

TEST_CASE("Lambda_M powers invert each other") {
  const auto g = make_grid(1, 8.0, 128);
  const double c[] = {-0.4};
  const auto f = gaussian(g, c, 0.9);
  const auto up = apply_lambda_m_power(make_norm_order(1, g, 1.0), f);
  const auto back = apply_lambda_m_power(make_norm_order(-1, g, 1.0), up);
  CHECK(l2_distance(back, f) < 1e-8);
  const auto two = apply_lambda_m_power(make_norm_order(2, g, 1.0), f);
  WaveFunction twice(g);
  const auto ord = make_norm_order(1, g, 1.0);
  apply_lambda_m(ord, g, up.values, twice.values);
  CHECK(l2_distance(two, twice) < 1e-10 * l2_norm(two));
}

TEST_CASE("mu prime lifts Lambda_M to at least one") {
  const auto g = make_grid(1, 8.0, 64);
  CHECK(choose_mu_prime(g, 1.0) == doctest::Approx(1.0));
  const auto ord = make_norm_order(1, g, 1.0);
  const auto f = plane_wave(g, 0, 0);
  WaveFunction out(g);
  apply_lambda_m(ord, g, f.values, out.values);
  for (std::size_t j = 0; j < f.size(); ++j) CHECK(out.values[j].real() >= 1.0);
}

TEST_CASE("weighted norms of a Gaussian") {
  const auto g = make_grid(1, 12.0, 256);
  const double c[] = {0.0};
  const double w = 1.2;
  const auto f = gaussian(g, c, w);
  CHECK(weighted_norm(make_norm_order(0, g, 1.0), f) == doctest::Approx(1.0));
  // ||f|| + ||f'|| + ||f''|| + ||<x>^4 f|| from the closed-form derivatives.
  double d1 = 0, d2 = 0, wx = 0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double x = g.node(int(j)), v = std::abs(f.values[j]);
    d1 += std::pow(v * x / (w * w), 2);
    d2 += std::pow(v * (x * x / std::pow(w, 4) - 1 / (w * w)), 2);
    wx += std::pow(v * std::pow(1 + x * x, 2), 2);
  }
  const double expect = 1.0 + std::sqrt(d1 * g.dx()) + std::sqrt(d2 * g.dx()) + std::sqrt(wx * g.dx());
  CHECK(weighted_norm(make_norm_order(1, g, 1.0), f) == doctest::Approx(expect).epsilon(1e-9));
  CHECK(derivative_norm_sum(f, 1) == doctest::Approx(std::sqrt(d1 * g.dx())).epsilon(1e-9));
  const double neg = weighted_norm(make_norm_order(-1, g, 1.0), f);
  CHECK(neg > 0.0);
  CHECK(neg < 1.0);
}

TEST_CASE("the mollified Hamiltonian is Hermitian and bounded by H") {
  std::mt19937_64 rng(33);
  const auto g = make_grid(1, 8.0, 32);
  const HamiltonianHandle h(family("harmonic"), 0.0, g);
  const CutoffSpec spec{0.25, 1.0};
  const auto map = MollifiedHamiltonian(h, spec).at(0.0);
  const CVec f = oracle::random_vector(g.size(), rng), u = oracle::random_vector(g.size(), rng);
  CVec hf(g.size()), hu(g.size());
  map(f, hf);
  map(u, hu);
  CHECK(std::abs(inner(hf, u) - inner(f, hu)) < 1e-10 * std::abs(inner(hf, u)));
  const double c[] = {0.0};
  const auto ground = gaussian(g, c, 1.0);
  const auto moll = apply_mollified(h, spec, 0.0, ground);
  const cplx e = l2_inner_product(moll, ground);
  CHECK(e.real() > 0.0);
  CHECK(e.real() < 0.5 + 1e-9);
}
