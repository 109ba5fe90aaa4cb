#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tdse/operators.hpp"
#include "tdse/symbolcalc.hpp"

using namespace tdse;

namespace {

SymbolField random_field(const SpatialGrid& g, std::mt19937_64& rng) {
  SymbolField s(g);
  s.values = oracle::random_vector(s.values.size(), rng);
  return s;
}

}  // namespace

TEST_CASE("quantization matches the dense Kohn–Nirenberg oracle") {
  std::mt19937_64 rng(21);
  for (const auto& g : {make_grid(1, 6.0, 32), make_grid(2, 3.0, 8)}) {
    const SymbolField s = random_field(g, rng);
    const auto dense = oracle::kohn_nirenberg(s);
    for (int r = 0; r < 5; ++r) {
      const CVec f = oracle::random_vector(g.size(), rng);
      CVec out(g.size());
      quantize_symbol(s, f, out);
      CHECK(oracle::distance(out, oracle::apply(dense, f)) < 1e-11 * oracle::norm(out));
    }
  }
}

TEST_CASE("adjoint quantization is the conjugate transpose") {
  std::mt19937_64 rng(22);
  const auto g = make_grid(1, 6.0, 32);
  const SymbolField s = random_field(g, rng);
  const auto dense = oracle::kohn_nirenberg(s);
  const CVec f = oracle::random_vector(g.size(), rng);
  CVec out(g.size());
  quantize_symbol_adjoint(s, f, out);
  for (std::size_t m = 0; m < g.size(); ++m) {
    cplx acc = 0;
    for (std::size_t j = 0; j < g.size(); ++j) acc += std::conj(dense(j, m)) * f[j];
    CHECK(std::abs(acc - out[m]) < 1e-11 * oracle::norm(out));
  }
}

TEST_CASE("a constant symbol quantizes to a multiple of the identity") {
  const auto g = make_grid(1, 5.0, 16);
  SymbolField s(g);
  for (auto& v : s.values) v = cplx(2.0, -1.0);
  std::mt19937_64 rng(1);
  const CVec f = oracle::random_vector(g.size(), rng);
  CVec out(g.size());
  quantize_symbol(s, f, out);
  for (std::size_t j = 0; j < f.size(); ++j) CHECK(std::abs(out[j] - cplx(2, -1) * f[j]) < 1e-12);
}

TEST_CASE("quantized h_s reproduces the symmetric Hamiltonian on localized states") {
  const auto fam = std::make_shared<const PotentialFamily>(builtin_family("confined_quartic"));
  const auto g = make_grid(1, 10.0, 128);
  const HamiltonianHandle h(fam, 0.0, g);
  const double t = 0.4;
  const auto sym = eval_symbol(SymbolKind::h_s, *fam, t, 0.0, g);
  const double c[] = {0.5};
  const auto f = gaussian(g, c, 0.8);
  const auto direct = apply_hamiltonian(h, t, f);
  const auto quant = quantize_symbol(sym, f);
  CHECK(l2_distance(direct, quant) < 1e-8 * l2_norm(direct));
}

TEST_CASE("symbol kinds at a sample point") {
  const auto fam = builtin_family("harmonic");
  const auto g = make_grid(1, 4.0, 16);
  SymbolOptions o;
  o.shift = 3.0;
  const auto hs = eval_symbol(SymbolKind::h, fam, 0.0, 0.0, g);
  const auto lam = eval_symbol(SymbolKind::lambda, fam, 0.0, 0.0, g, o);
  const auto par = eval_symbol(SymbolKind::parametrix, fam, 0.0, 0.0, g, o);
  const std::size_t j = 5, k = 3;
  const double x = g.coordinate(j, 0), xi = g.wavenumber(k, 0);
  CHECK(hs.at(j, k).real() == doctest::Approx(xi * xi / 2 + x * x / 2));
  CHECK(lam.at(j, k).real() == doctest::Approx(3.0 + xi * xi / 2 + x * x / 2));
  CHECK(std::abs(par.at(j, k) * lam.at(j, k) - 1.0) < 1e-14);
}

TEST_CASE("cutoff specs and profiles") {
  CHECK_THROWS(validate(CutoffSpec{0.0, 1.0}));
  CHECK_THROWS(validate(CutoffSpec{1.5, 1.0}));
  CHECK_THROWS(validate(CutoffSpec{0.5, NAN}));
  CHECK_NOTHROW(validate(CutoffSpec{0.5, 1.0}));
  CHECK(cutoff_profile(CutoffProfile::gaussian, 0.0) == 1.0);
  CHECK(cutoff_profile(CutoffProfile::gaussian, 2.0) == doctest::Approx(std::exp(-4.0)));
  CHECK(cutoff_profile(CutoffProfile::unit, 7.0) == 1.0);
  const auto fam = builtin_family("harmonic");
  CHECK_THROWS(eval_symbol(SymbolKind::cutoff, fam, 0.0, 0.0, make_grid(1, 4.0, 16)));
}

TEST_CASE("parametrix refuses shifts below the admissibility threshold") {
  const auto fam = builtin_family("confined_quartic");
  const auto g = make_grid(1, 10.0, 64);
  const double t = 0.0;
  const auto scan = scan_ellipticity(fam, g, std::span(&t, 1), 0.0);
  CHECK(scan.holds);
  CHECK(scan.c0_star > 0.0);
  CHECK(scan.mu_min == doctest::Approx(scan.c0_star / 2 + scan.c1_star));
  SymbolOptions o;
  o.shift = scan.mu_min - 0.05;
  CHECK_THROWS_AS(eval_symbol(SymbolKind::parametrix, fam, t, 0.0, g, o), InadmissibleShift);
  o.shift = scan.mu_min + 1.0;
  CHECK_NOTHROW(eval_symbol(SymbolKind::parametrix, fam, t, 0.0, g, o));
}

TEST_CASE("oversized phase-space fields are refused") {
  CHECK_THROWS(SymbolField(make_grid(2, 5.0, 128)));
}

TEST_CASE("log-log slope of a pure power law") {
  const double x[] = {1, 2, 4, 8}, y[] = {3, 3 / std::sqrt(2.0), 1.5, 3 / std::sqrt(8.0)};
  CHECK(loglog_slope(x, y) == doctest::Approx(-0.5));
}

TEST_CASE("parametrix residual shrinks as the shift grows") {
  const auto fam = builtin_family("oscillating_quartic");
  const auto g = make_grid(1, 10.0, 64);
  const double t = 0.0;
  const auto scan = scan_ellipticity(fam, g, std::span(&t, 1), 0.0);
  const double mus[] = {scan.c1_star + 10.0, scan.c1_star + 100.0};
  const auto curve = parametrix_residual(fam, t, 0.0, g, mus, {8, 10, 3});
  REQUIRE(curve.points.size() == 2);
  CHECK(curve.points[1].residual < curve.points[0].residual);
  CHECK(curve.slope < 0.0);
}

TEST_CASE("a unit cutoff commutes with the Hamiltonian") {
  const auto fam = std::make_shared<const PotentialFamily>(builtin_family("harmonic"));
  const auto g = make_grid(1, 8.0, 32);
  SymbolOptions o;
  o.cutoff = CutoffSpec{1.0, 0.0, CutoffProfile::unit};
  const auto chi = eval_symbol(SymbolKind::cutoff, *fam, 0.0, 0.0, g, o);
  const HamiltonianHandle h(fam, 0.0, g);
  const auto est = commutator_norm(chi, *h.frozen(0.0), 1.0, {4, 6, 9});
  CHECK(est.value < 1e-9);
}
