#include "tdse/symbolcalc.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "tdse/fft.hpp"
#include "tdse/kernels.hpp"
#include "tdse/operators.hpp"

namespace tdse {

SymbolField::SymbolField(const SpatialGrid& g) : grid(g) {
  const std::size_t n = g.size();
  if (n * n > kMaxSymbolEntries)
    throw std::invalid_argument("SymbolField: grid too large for a phase-space field");
  values.assign(n * n, cplx(0.0));
}

void validate(const CutoffSpec& spec) {
  if (!(spec.eps > 0.0 && spec.eps <= 1.0))
    throw std::invalid_argument("CutoffSpec: eps must lie in (0, 1]");
  if (!std::isfinite(spec.mu)) throw std::invalid_argument("CutoffSpec: mu");
}

double cutoff_profile(CutoffProfile profile, double s) {
  switch (profile) {
    case CutoffProfile::gaussian: return std::exp(-s * s);
    case CutoffProfile::unit: return 1.0;
  }
  return 1.0;
}

namespace {

struct PhaseSpace {
  PotentialSamples pot;
  RVec div;
  std::vector<RVec> freq;
};

PhaseSpace sample_phase_space(const PotentialFamily& fam, double t, double rho,
                              const SpatialGrid& grid, bool need_div) {
  PhaseSpace ps;
  ps.pot = eval_potential(fam, t, rho, grid);
  if (need_div && fam.magnetic()) ps.div = eval_divergence(fam, t, rho, grid);
  for (int a = 0; a < grid.dim(); ++a) ps.freq.push_back(frequency_array(grid, a));
  return ps;
}

double classical_h(const PhaseSpace& ps, double mass, std::size_t j,
                   std::size_t k) {
  double kin = 0.0;
  for (std::size_t a = 0; a < ps.freq.size(); ++a) {
    const double p = ps.freq[a][k] - ps.pot.vector[a][j];
    kin += p * p;
  }
  return kin / (2.0 * mass) + ps.pot.scalar[j];
}

double xi_squared(const PhaseSpace& ps, std::size_t k) {
  double s = 0.0;
  for (const auto& f : ps.freq) s += f[k] * f[k];
  return s;
}

}  // namespace

EllipticityScan scan_ellipticity(const PotentialFamily& fam,
                                 const SpatialGrid& grid,
                                 std::span<const double> t_samples, double rho) {
  if (t_samples.empty()) throw std::invalid_argument("scan_ellipticity: no times");
  const std::size_t n = grid.size();
  const RVec bracket = japanese_bracket(grid);
  const double p = 2.0 * (fam.growth_order() + 1.0);
  RVec weight(n);
  for (std::size_t j = 0; j < n; ++j) weight[j] = std::pow(bracket[j], p);
  // Outer region: |x_a| >= L/2 or |xi_a| >= xi_max/2 on some axis.
  std::vector<char> outer_x(n, 0), outer_xi(n, 0);
  for (std::size_t j = 0; j < n; ++j)
    for (int a = 0; a < grid.dim(); ++a) {
      if (std::abs(grid.coordinate(j, a)) >= 0.5 * grid.half_width()) outer_x[j] = 1;
      if (std::abs(grid.wavenumber(j, a)) >= 0.5 * grid.max_frequency()) outer_xi[j] = 1;
    }

  double max_ratio = 0.0;
  double outer_min = std::numeric_limits<double>::infinity();
  double min_h = std::numeric_limits<double>::infinity();
  std::vector<PhaseSpace> spaces;
  for (double t : t_samples) {
    spaces.push_back(sample_phase_space(fam, t, rho, grid, false));
    const PhaseSpace& ps = spaces.back();
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double h = classical_h(ps, fam.mass(), j, k);
        const double theta = 1.0 + xi_squared(ps, k) + weight[j];
        const double ratio = h / theta;
        max_ratio = std::max(max_ratio, ratio);
        min_h = std::min(min_h, h);
        if (outer_x[j] || outer_xi[k]) outer_min = std::min(outer_min, ratio);
      }
  }
  EllipticityScan scan;
  scan.min_h = min_h;
  if (!(outer_min > 0.0) || !(max_ratio > 0.0)) return scan;
  scan.c0_star = std::min(1.0 / max_ratio, 0.5 * outer_min);
  double c1 = 0.0;
  for (const PhaseSpace& ps : spaces)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double theta = 1.0 + xi_squared(ps, k) + weight[j];
        c1 = std::max(c1, scan.c0_star * theta - classical_h(ps, fam.mass(), j, k));
      }
  scan.c1_star = c1;
  scan.mu_min = 0.5 * scan.c0_star + c1;
  scan.holds = true;
  return scan;
}

SymbolField eval_symbol(SymbolKind kind, const PotentialFamily& fam, double t,
                        double rho, const SpatialGrid& grid,
                        const SymbolOptions& opts) {
  if (fam.dim() != grid.dim()) throw GridMismatch("eval_symbol: dimension");
  SymbolField field(grid);
  field.t = t;
  field.rho = rho;
  const std::size_t n = grid.size();
  const double m = fam.mass();
  const double mu = opts.shift;

  if (kind == SymbolKind::lambda_m) {
    const RVec bracket = japanese_bracket(grid);
    const double p = 2.0 * (fam.growth_order() + 1.0);
    std::vector<RVec> freq;
    for (int a = 0; a < grid.dim(); ++a) freq.push_back(frequency_array(grid, a));
    for (std::size_t j = 0; j < n; ++j) {
      const double w = std::pow(bracket[j], p);
      for (std::size_t k = 0; k < n; ++k) {
        double xi2 = 0.0;
        for (const auto& f : freq) xi2 += f[k] * f[k];
        field.at(j, k) = mu + xi2 / (2.0 * m) + w;
      }
    }
    return field;
  }

  const bool need_div = kind == SymbolKind::h_s || kind == SymbolKind::lambda ||
                        kind == SymbolKind::parametrix;
  const PhaseSpace ps = sample_phase_space(fam, t, rho, grid, need_div);
  auto imag_part = [&](std::size_t j) {
    return ps.div.empty() ? 0.0 : ps.div[j] / (2.0 * m);
  };

  if (kind == SymbolKind::parametrix) {
    const double mu_min = opts.mu_min ? *opts.mu_min
                                      : scan_ellipticity(fam, grid, std::span(&t, 1), rho).mu_min;
    double worst = std::numeric_limits<double>::infinity();
    std::size_t wj = 0, wk = 0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double re = mu + classical_h(ps, m, j, k);
        if (re < worst) {
          worst = re;
          wj = j;
          wk = k;
        }
      }
    if (mu < mu_min || !(worst > 0.0))
      throw InadmissibleShift(
          "parametrix: mu = " + std::to_string(mu) + " below mu_min = " +
              std::to_string(mu_min) + "; smallest mu + Re h_s = " +
              std::to_string(worst) + " at x = " +
              std::to_string(grid.coordinate(wj, 0)) +
              ", xi = " + std::to_string(grid.wavenumber(wk, 0)),
          mu, mu_min, grid.coordinate(wj, 0), grid.wavenumber(wk, 0));
  }

  std::optional<CutoffSpec> cut = opts.cutoff;
  if (kind == SymbolKind::cutoff) {
    if (!cut) throw std::invalid_argument("eval_symbol: cutoff kind needs a CutoffSpec");
    validate(*cut);
  }

  for (std::size_t j = 0; j < n; ++j) {
    const double im = imag_part(j);
    for (std::size_t k = 0; k < n; ++k) {
      const double h = classical_h(ps, m, j, k);
      cplx v;
      switch (kind) {
        case SymbolKind::h: v = h; break;
        case SymbolKind::h_s: v = cplx(h, im); break;
        case SymbolKind::lambda: v = cplx(mu + h, im); break;
        case SymbolKind::parametrix: v = 1.0 / cplx(mu + h, im); break;
        case SymbolKind::cutoff:
          v = cutoff_profile(cut->profile, cut->eps * (cut->mu + h));
          break;
        case SymbolKind::lambda_m: break;
      }
      field.at(j, k) = v;
    }
  }
  return field;
}

void quantize_symbol(const SymbolField& s, std::span<const cplx> in,
                     std::span<cplx> out) {
  const SpatialGrid& g = s.grid;
  if (in.size() != g.size() || out.size() != g.size())
    throw GridMismatch("quantize_symbol: length mismatch");
  CVec fhat(in.begin(), in.end());
  fft::forward(g, fhat);
  const double inv = 1.0 / static_cast<double>(g.size());
  for (auto& v : fhat) v *= inv;
  kernels::kn_apply(g.points(), g.dim(), s.values, fhat, out);
}

WaveFunction quantize_symbol(const SymbolField& s, const WaveFunction& f) {
  require_same_grid(s.grid, f.grid);
  WaveFunction out(f.grid);
  quantize_symbol(s, f.values, out.values);
  return out;
}

void quantize_symbol_adjoint(const SymbolField& s, std::span<const cplx> in,
                             std::span<cplx> out) {
  const SpatialGrid& g = s.grid;
  if (in.size() != g.size() || out.size() != g.size())
    throw GridMismatch("quantize_symbol_adjoint: length mismatch");
  kernels::kn_adjoint_gather(g.points(), g.dim(), s.values, in, out);
  fft::backward(g, out);
  const double inv = 1.0 / static_cast<double>(g.size());
  for (auto& v : out) v *= inv;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

ResidualCurve parametrix_residual(const PotentialFamily& fam, double t,
                                  double rho, const SpatialGrid& grid,
                                  std::span<const double> mu_list,
                                  const ProbeOptions& probe) {
  ResidualCurve curve;
  const EllipticityScan scan = scan_ellipticity(fam, grid, std::span(&t, 1), rho);
  if (!scan.holds)
    throw std::runtime_error("parametrix_residual: ellipticity scan failed");
  curve.c0_star = scan.c0_star;
  curve.c1_star = scan.c1_star;
  curve.mu_min = scan.mu_min;

  const HamiltonianHandle handle(std::make_shared<PotentialFamily>(fam), rho, grid);
  const auto h = handle.frozen(t);
  const std::size_t n = grid.size();

  for (double mu : mu_list) {
    SymbolOptions opts;
    opts.shift = mu;
    opts.mu_min = scan.mu_min;
    SymbolField p;
    try {
      p = eval_symbol(SymbolKind::parametrix, fam, t, rho, grid, opts);
    } catch (const InadmissibleShift& e) {
      std::cerr << "warning: skipping " << e.what() << '\n';
      curve.skipped.push_back(mu);
      continue;
    }
    CVec tmp(n), tmp2(n);
    LinearMap residual = [&](std::span<const cplx> in, std::span<cplx> out) {
      quantize_symbol(p, in, tmp);
      h->apply(tmp, out);
      for (std::size_t i = 0; i < n; ++i) out[i] += mu * tmp[i] - in[i];
    };
    LinearMap adjoint = [&](std::span<const cplx> in, std::span<cplx> out) {
      h->apply(in, tmp2);
      for (std::size_t i = 0; i < n; ++i) tmp2[i] += mu * in[i];
      quantize_symbol_adjoint(p, tmp2, out);
      for (std::size_t i = 0; i < n; ++i) out[i] -= in[i];
    };
    const NormEstimate est = estimate_operator_norm(
        residual, adjoint, n, probe.n_probe, probe.iterations, probe.seed);
    curve.points.push_back({mu, mu - scan.c1_star, est.value, est.probes});
  }
  if (curve.points.size() >= 2) {
    std::vector<double> xs, ys;
    for (const auto& pt : curve.points) {
      xs.push_back(pt.mu_offset);
      ys.push_back(pt.residual);
    }
    curve.slope = loglog_slope(xs, ys);
  }
  return curve;
}

NormEstimate commutator_norm(const SymbolField& chi, const FrozenOperator& h,
                             double mu, const ProbeOptions& probe) {
  const std::size_t n = chi.grid.size();
  CVec a(n), b(n);
  // K = X Lambda - Lambda X, Lambda = mu + H
  LinearMap k = [&](std::span<const cplx> in, std::span<cplx> out) {
    h.apply(in, a);
    for (std::size_t i = 0; i < n; ++i) a[i] += mu * in[i];
    quantize_symbol(chi, a, out);
    quantize_symbol(chi, in, b);
    h.apply(b, a);
    for (std::size_t i = 0; i < n; ++i) out[i] -= a[i] + mu * b[i];
  };
  // K^dagger = Lambda X^dagger - X^dagger Lambda
  LinearMap kt = [&](std::span<const cplx> in, std::span<cplx> out) {
    quantize_symbol_adjoint(chi, in, b);
    h.apply(b, out);
    for (std::size_t i = 0; i < n; ++i) out[i] += mu * b[i];
    h.apply(in, a);
    for (std::size_t i = 0; i < n; ++i) a[i] += mu * in[i];
    quantize_symbol_adjoint(chi, a, b);
    for (std::size_t i = 0; i < n; ++i) out[i] -= b[i];
  };
  return estimate_operator_norm(k, kt, n, probe.n_probe, probe.iterations,
                                probe.seed);
}

BoundCurve commutator_probe(const PotentialFamily& fam, double t, double rho,
                            const SpatialGrid& grid, double mu,
                            std::span<const double> eps_list,
                            const ProbeOptions& probe) {
  const HamiltonianHandle handle(std::make_shared<PotentialFamily>(fam), rho, grid);
  const auto h = handle.frozen(t);
  BoundCurve curve;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double eps : eps_list) {
    SymbolOptions opts;
    opts.cutoff = CutoffSpec{eps, mu, CutoffProfile::gaussian};
    const SymbolField chi = eval_symbol(SymbolKind::cutoff, fam, t, rho, grid, opts);
    const NormEstimate est = commutator_norm(chi, *h, mu, probe);
    curve.points.push_back({eps, est.value, est.probes});
    lo = std::min(lo, est.value);
    hi = std::max(hi, est.value);
  }
  curve.sup = hi;
  curve.spread = lo > 0.0 ? hi / lo : (hi > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
  curve.diverges = curve.spread > 10.0;
  return curve;
}

}  // namespace tdse
