#include "tdse/operators.hpp"

#include <algorithm>
#include <cmath>

#include "tdse/fft.hpp"
#include "tdse/kernels.hpp"

namespace tdse {

FrozenOperator::FrozenOperator(SpatialGrid grid, std::vector<double> masses,
                               double kinetic, std::vector<RVec> vector,
                               RVec scalar)
    : grid_(grid),
      masses_(std::move(masses)),
      kinetic_(kinetic),
      vector_(std::move(vector)),
      scalar_(std::move(scalar)) {
  const int d = grid_.dim();
  if (static_cast<int>(masses_.size()) != d)
    throw std::invalid_argument("FrozenOperator: one mass per axis");
  if (vector_.empty()) vector_.resize(d);
  if (static_cast<int>(vector_.size()) != d)
    throw std::invalid_argument("FrozenOperator: one vector component per axis");
  for (const auto& b : vector_)
    if (!b.empty() && b.size() != grid_.size())
      throw GridMismatch("FrozenOperator: vector length");
  if (scalar_.empty()) scalar_.assign(grid_.size(), 0.0);
  if (scalar_.size() != grid_.size()) throw GridMismatch("FrozenOperator: scalar length");
  for (int a = 0; a < d; ++a) freq_.push_back(frequency_array(grid_, a));
}

void FrozenOperator::apply(std::span<const cplx> in, std::span<cplx> out) const {
  const std::size_t n = grid_.size();
  if (in.size() != n || out.size() != n) throw GridMismatch("FrozenOperator::apply");
  const double inv_n = 1.0 / grid_.points();
  for (std::size_t i = 0; i < n; ++i) out[i] = scalar_[i] * in[i];
  CVec f(n), g(n), pf(n);
  for (int a = 0; a < grid_.dim(); ++a) {
    const RVec& xi = freq_[a];
    const RVec& b = vector_[a];
    const double c = 1.0 / (2.0 * masses_[a]);
    std::copy(in.begin(), in.end(), f.begin());
    fft::forward_axis(grid_, f, a);
    if (b.empty()) {
      if (kinetic_ == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) f[i] *= kinetic_ * xi[i] * xi[i] * inv_n;
      fft::backward_axis(grid_, f, a);
      for (std::size_t i = 0; i < n; ++i) out[i] += c * f[i];
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) g[i] = b[i] * in[i];
    fft::forward_axis(grid_, g, a);
    for (std::size_t i = 0; i < n; ++i) {
      pf[i] = xi[i] * f[i] * inv_n;
      f[i] = (kinetic_ * xi[i] * xi[i] * f[i] - xi[i] * g[i]) * inv_n;
    }
    fft::backward_axis(grid_, f, a);
    fft::backward_axis(grid_, pf, a);
    for (std::size_t i = 0; i < n; ++i) out[i] += c * (f[i] - b[i] * pf[i]);
  }
}

WaveFunction FrozenOperator::apply(const WaveFunction& f) const {
  require_same_grid(grid_, f.grid);
  WaveFunction out(grid_);
  apply(f.values, out.values);
  return out;
}

LinearMap as_map(std::shared_ptr<const FrozenOperator> op) {
  return [op](std::span<const cplx> in, std::span<cplx> out) { op->apply(in, out); };
}

FrozenMap frozen_map_of(std::shared_ptr<const FrozenOperator> op) {
  RVec diag = op->scalar();
  return {as_map(std::move(op)), std::move(diag)};
}

HamiltonianHandle::HamiltonianHandle(std::shared_ptr<const PotentialFamily> fam,
                                     double rho, SpatialGrid grid)
    : fam_(std::move(fam)), rho_(rho), grid_(grid) {
  if (!fam_) throw std::invalid_argument("HamiltonianHandle: null family");
  if (fam_->dim() != grid_.dim()) throw GridMismatch("HamiltonianHandle: dimension");
}

std::shared_ptr<const FrozenOperator> HamiltonianHandle::frozen(double t) const {
  PotentialSamples p = eval_potential(*fam_, t, rho_, grid_);
  const double m = fam_->mass();
  RVec s = p.scalar;
  std::vector<RVec> b(grid_.dim());
  if (fam_->magnetic()) {
    for (int a = 0; a < grid_.dim(); ++a) {
      for (std::size_t i = 0; i < s.size(); ++i)
        s[i] += p.vector[a][i] * p.vector[a][i] / (2.0 * m);
      b[a] = std::move(p.vector[a]);
    }
  }
  return std::make_shared<FrozenOperator>(
      grid_, std::vector<double>(grid_.dim(), m), 1.0, std::move(b), std::move(s));
}

std::shared_ptr<const FrozenOperator> HamiltonianHandle::rho_derivative(double t) const {
  const double m = fam_->mass();
  PotentialSamples d = partial_rho(*fam_, t, rho_, grid_);
  RVec s = d.scalar;
  std::vector<RVec> b(grid_.dim());
  if (fam_->magnetic()) {
    const PotentialSamples p = eval_potential(*fam_, t, rho_, grid_);
    for (int a = 0; a < grid_.dim(); ++a) {
      if (fam_->vector_drho(a).is_zero()) continue;
      for (std::size_t i = 0; i < s.size(); ++i)
        s[i] += p.vector[a][i] * d.vector[a][i] / m;
      b[a] = std::move(d.vector[a]);
    }
  }
  return std::make_shared<FrozenOperator>(
      grid_, std::vector<double>(grid_.dim(), m), 0.0, std::move(b), std::move(s));
}

LinearMap HamiltonianHandle::at(double t) const { return as_map(frozen(t)); }

WaveFunction apply_hamiltonian(const HamiltonianHandle& h, double t,
                               const WaveFunction& f) {
  require_same_grid(h.grid(), f.grid);
  return h.frozen(t)->apply(f);
}

MollifiedHamiltonian::MollifiedHamiltonian(const HamiltonianHandle& h,
                                           CutoffSpec spec)
    : h_(h), spec_(spec) {
  validate(spec_);
}

LinearMap MollifiedHamiltonian::at(double t) const {
  SymbolOptions opts;
  opts.cutoff = spec_;
  auto chi = std::make_shared<const SymbolField>(
      eval_symbol(SymbolKind::cutoff, h_.family(), t, h_.rho(), h_.grid(), opts));
  auto op = h_.frozen(t);
  auto tmp = std::make_shared<CVec>(h_.grid().size());
  auto tmp2 = std::make_shared<CVec>(h_.grid().size());
  return [chi, op, tmp, tmp2](std::span<const cplx> in, std::span<cplx> out) {
    quantize_symbol(*chi, in, *tmp);
    op->apply(*tmp, *tmp2);
    quantize_symbol_adjoint(*chi, *tmp2, out);
  };
}

WaveFunction apply_mollified(const HamiltonianHandle& h, const CutoffSpec& spec,
                             double t, const WaveFunction& f) {
  require_same_grid(h.grid(), f.grid);
  WaveFunction out(f.grid);
  MollifiedHamiltonian(h, spec).at(t)(f.values, out.values);
  return out;
}

// Weighted norms -------------------------------------------------------------

namespace {

RVec weight_power(const SpatialGrid& grid, double exponent) {
  RVec w = japanese_bracket(grid);
  for (auto& v : w) v = std::pow(v, exponent);
  return w;
}

RVec xi_squared(const SpatialGrid& grid) {
  RVec s(grid.size(), 0.0);
  for (int a = 0; a < grid.dim(); ++a) {
    const RVec f = frequency_array(grid, a);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += f[i] * f[i];
  }
  return s;
}

}  // namespace

double choose_mu_prime(const SpatialGrid& grid, double growth_order, double mass) {
  const RVec w = weight_power(grid, 2.0 * (growth_order + 1.0));
  const RVec xi2 = xi_squared(grid);
  const double lo = *std::min_element(w.begin(), w.end()) +
                    *std::min_element(xi2.begin(), xi2.end()) / (2.0 * mass);
  return 1.0 + std::max(0.0, -lo);
}

NormOrder make_norm_order(int a, const SpatialGrid& grid, double growth_order,
                          double mass) {
  return NormOrder{a, growth_order, choose_mu_prime(grid, growth_order, mass), mass};
}

void apply_lambda_m(const NormOrder& order, const SpatialGrid& grid,
                    std::span<const cplx> in, std::span<cplx> out) {
  const std::size_t n = grid.size();
  if (in.size() != n || out.size() != n) throw GridMismatch("apply_lambda_m");
  const RVec w = weight_power(grid, 2.0 * (order.growth_order + 1.0));
  const RVec xi2 = xi_squared(grid);
  CVec f(in.begin(), in.end());
  fft::forward(grid, f);
  const double scale = 1.0 / (2.0 * order.mass * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) f[i] *= xi2[i] * scale;
  fft::backward(grid, f);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = (order.mu_prime + w[i]) * in[i] + f[i];
}

WaveFunction apply_lambda_m_power(const NormOrder& order, const WaveFunction& f,
                                  LambdaSolveOptions opts) {
  const SpatialGrid& grid = f.grid;
  WaveFunction cur = f;
  WaveFunction next(grid);
  LinearMap lam = [&](std::span<const cplx> in, std::span<cplx> out) {
    apply_lambda_m(order, grid, in, out);
  };
  for (int i = 0; i < std::abs(order.a); ++i) {
    if (order.a > 0) {
      lam(cur.values, next.values);
    } else {
      std::fill(next.values.begin(), next.values.end(), cplx(0.0));
      const SolveStats st =
          conjugate_gradient(lam, cur.values, next.values, opts.tol, opts.max_iter);
      if (!st.converged)
        throw SolverError("apply_lambda_m_power: CG did not converge (residual " +
                          std::to_string(st.relative_residual) + ")");
    }
    std::swap(cur, next);
  }
  return cur;
}

double derivative_norm_sum(const WaveFunction& f, int max_order) {
  const SpatialGrid& grid = f.grid;
  const std::size_t n = grid.size();
  CVec fh = f.values;
  fft::forward(grid, fh);
  RVec power(n);
  const double scale = grid.cell_volume() / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) power[i] = std::norm(fh[i]) * scale;
  auto norm_of = [&](auto&& multiplier) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = multiplier(i);
      s += m * m * power[i];
    }
    return std::sqrt(s);
  };
  double total = 0.0;
  if (grid.dim() == 1) {
    const RVec xi = frequency_array(grid, 0);
    for (int k = 1; k <= max_order; ++k)
      total += norm_of([&](std::size_t i) { return std::pow(xi[i], k); });
  } else {
    const RVec x0 = frequency_array(grid, 0), x1 = frequency_array(grid, 1);
    for (int total_order = 1; total_order <= max_order; ++total_order)
      for (int k0 = 0; k0 <= total_order; ++k0) {
        const int k1 = total_order - k0;
        total += norm_of([&](std::size_t i) {
          return std::pow(x0[i], k0) * std::pow(x1[i], k1);
        });
      }
  }
  return total;
}

double weighted_norm(const NormOrder& order, const WaveFunction& f,
                     LambdaSolveOptions opts) {
  if (order.a == 0) return l2_norm(f);
  if (order.a < 0) return l2_norm(apply_lambda_m_power(order, f, opts));
  const RVec w = weight_power(f.grid, 2.0 * order.a * (order.growth_order + 1.0));
  WaveFunction wf(f.grid);
  kernels::multiply(w, f.values, wf.values);
  return l2_norm(f) + derivative_norm_sum(f, 2 * order.a) + l2_norm(wf);
}

}  // namespace tdse
