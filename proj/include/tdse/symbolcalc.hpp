#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdse/grid.hpp"
#include "tdse/linalg.hpp"
#include "tdse/potentials.hpp"

namespace tdse {

class FrozenOperator;

/// Phase-space samples s(x_j, xi_k); flat index j * N^d + k.
struct SymbolField {
  SpatialGrid grid;
  double t = 0.0;
  double rho = 0.0;
  CVec values;

  SymbolField() = default;
  explicit SymbolField(const SpatialGrid& g);
  std::size_t nodes() const { return grid.size(); }
  cplx& at(std::size_t j, std::size_t k) { return values[j * nodes() + k]; }
  cplx at(std::size_t j, std::size_t k) const { return values[j * nodes() + k]; }
};

/// Largest phase-space field we agree to materialize (N^{2d} entries).
inline constexpr std::size_t kMaxSymbolEntries = std::size_t{1} << 24;

enum class CutoffProfile { gaussian, unit };

/// chi_eps(t, x, xi) = chi(eps (mu + h(t, x, xi))); gaussian chi(s) = exp(-s^2).
struct CutoffSpec {
  double eps = 1.0;
  double mu = 0.0;
  CutoffProfile profile = CutoffProfile::gaussian;
};

void validate(const CutoffSpec& spec);
double cutoff_profile(CutoffProfile profile, double s);

enum class SymbolKind { h, h_s, lambda, lambda_m, parametrix, cutoff };

struct SymbolOptions {
  double shift = 0.0;                 ///< mu (or mu' for lambda_m)
  std::optional<CutoffSpec> cutoff;   ///< required for SymbolKind::cutoff
  std::optional<double> mu_min;       ///< parametrix admissibility threshold
};

class InadmissibleShift : public std::invalid_argument {
 public:
  InadmissibleShift(const std::string& what, double mu, double mu_min,
                    double x, double xi)
      : std::invalid_argument(what), mu(mu), mu_min(mu_min), x(x), xi(xi) {}
  double mu, mu_min, x, xi;
};

/// Grid scan for C0* (<xi>^2 + <x>^{2(M+1)}) - C1* <= h <= (<xi>^2 + ...)/C0*.
struct EllipticityScan {
  double c0_star = 0.0;
  double c1_star = 0.0;
  double mu_min = 0.0;  ///< C0*/2 + C1*
  bool holds = false;
  double min_h = 0.0;
};

EllipticityScan scan_ellipticity(const PotentialFamily& fam,
                                 const SpatialGrid& grid,
                                 std::span<const double> t_samples, double rho);

SymbolField eval_symbol(SymbolKind kind, const PotentialFamily& fam, double t,
                        double rho, const SpatialGrid& grid,
                        const SymbolOptions& opts = {});

/// Kohn–Nirenberg quantization (S f)(x_j) = sum_k e^{i x_j xi_k} s(x_j, xi_k) fhat(xi_k).
WaveFunction quantize_symbol(const SymbolField& s, const WaveFunction& f);
void quantize_symbol(const SymbolField& s, std::span<const cplx> in,
                     std::span<cplx> out);
/// Conjugate transpose of quantize_symbol, by the reversed factorization.
void quantize_symbol_adjoint(const SymbolField& s, std::span<const cplx> in,
                             std::span<cplx> out);

struct ProbeOptions {
  int n_probe = 16;
  int iterations = 12;
  std::uint64_t seed = 1;
};

struct ResidualPoint {
  double mu = 0.0;
  double mu_offset = 0.0;  ///< mu - C1*
  double residual = 0.0;
  int probes = 0;
};

struct ResidualCurve {
  std::vector<ResidualPoint> points;
  std::vector<double> skipped;  ///< inadmissible mu values
  double c0_star = 0.0;
  double c1_star = 0.0;
  double mu_min = 0.0;
  double slope = 0.0;  ///< log-log slope of residual against mu - C1*
};

/// Estimate ||(mu + H) Quant(p_mu) - I|| for each mu.
ResidualCurve parametrix_residual(const PotentialFamily& fam, double t,
                                  double rho, const SpatialGrid& grid,
                                  std::span<const double> mu_list,
                                  const ProbeOptions& probe = {});

struct BoundPoint {
  double eps = 0.0;
  double bound = 0.0;
  int probes = 0;
};

struct BoundCurve {
  std::vector<BoundPoint> points;
  double sup = 0.0;
  double spread = 0.0;  ///< max / min over the eps range
  bool diverges = false;
};

/// ||[X, mu + H]|| for a given cutoff field and frozen Hamiltonian.
NormEstimate commutator_norm(const SymbolField& chi, const FrozenOperator& h,
                             double mu, const ProbeOptions& probe);

BoundCurve commutator_probe(const PotentialFamily& fam, double t, double rho,
                            const SpatialGrid& grid, double mu,
                            std::span<const double> eps_list,
                            const ProbeOptions& probe = {});

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace tdse
