#include "tdse/linalg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "tdse/kernels.hpp"

namespace tdse {
namespace {

double norm(std::span<const cplx> v) { return std::sqrt(kernels::norm_sq(v)); }

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

SolveStats gmres(const LinearMap& op, std::span<const cplx> rhs,
                 std::span<cplx> x, double tol, int max_iter, int restart) {
  const std::size_t n = rhs.size();
  SolveStats stats;
  const double bnorm = norm(rhs);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), cplx(0.0));
    stats.converged = true;
    return stats;
  }
  restart = std::max(1, std::min(restart, max_iter));
  std::vector<CVec> basis(restart + 1, CVec(n));
  Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(restart + 1, restart);
  std::vector<cplx> cs(restart), sn(restart), g(restart + 1);
  CVec work(n);

  while (stats.iterations < max_iter) {
    op(x, work);
    for (std::size_t i = 0; i < n; ++i) basis[0][i] = rhs[i] - work[i];
    double beta = norm(basis[0]);
    stats.relative_residual = beta / bnorm;
    if (stats.relative_residual <= tol) {
      stats.converged = true;
      return stats;
    }
    for (auto& v : basis[0]) v /= beta;
    std::fill(g.begin(), g.end(), cplx(0.0));
    g[0] = beta;
    hess.setZero();
    int k = 0;
    for (; k < restart && stats.iterations < max_iter; ++k) {
      ++stats.iterations;
      op(basis[k], basis[k + 1]);
      for (int i = 0; i <= k; ++i) {
        const cplx hij = kernels::dot(basis[k + 1], basis[i]);
        hess(i, k) = hij;
        axpy(-hij, basis[i], basis[k + 1]);
      }
      const double hnext = norm(basis[k + 1]);
      hess(k + 1, k) = hnext;
      if (hnext > 0.0)
        for (auto& v : basis[k + 1]) v /= hnext;
      for (int i = 0; i < k; ++i) {
        const cplx a = hess(i, k), b = hess(i + 1, k);
        hess(i, k) = std::conj(cs[i]) * a + std::conj(sn[i]) * b;
        hess(i + 1, k) = -sn[i] * a + cs[i] * b;
      }
      const cplx a = hess(k, k), b = hess(k + 1, k);
      const double r = std::sqrt(std::norm(a) + std::norm(b));
      cs[k] = a / r;
      sn[k] = b / r;
      hess(k, k) = r;
      hess(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = std::conj(cs[k]) * g[k];
      stats.relative_residual = std::abs(g[k + 1]) / bnorm;
      if (stats.relative_residual <= tol || hnext == 0.0) {
        ++k;
        break;
      }
    }
    std::vector<cplx> y(k);
    for (int i = k - 1; i >= 0; --i) {
      cplx s = g[i];
      for (int j = i + 1; j < k; ++j) s -= hess(i, j) * y[j];
      y[i] = s / hess(i, i);
    }
    for (int i = 0; i < k; ++i) axpy(y[i], basis[i], x);
    if (stats.relative_residual <= tol) {
      // Confirm with a true residual; Givens estimates drift near roundoff.
      op(x, work);
      double res = 0.0;
      for (std::size_t i = 0; i < n; ++i) res += std::norm(rhs[i] - work[i]);
      stats.relative_residual = std::sqrt(res) / bnorm;
      if (stats.relative_residual <= 10.0 * tol) {
        stats.converged = true;
        return stats;
      }
    }
  }
  return stats;
}

SolveStats conjugate_gradient(const LinearMap& op, std::span<const cplx> rhs,
                              std::span<cplx> x, double tol, int max_iter) {
  const std::size_t n = rhs.size();
  SolveStats stats;
  const double bnorm = norm(rhs);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), cplx(0.0));
    stats.converged = true;
    return stats;
  }
  CVec r(n), p(n), ap(n);
  op(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
  p = r;
  double rr = kernels::norm_sq(r);
  while (stats.iterations < max_iter) {
    stats.relative_residual = std::sqrt(rr) / bnorm;
    if (stats.relative_residual <= tol) {
      stats.converged = true;
      return stats;
    }
    op(p, ap);
    const double alpha = rr / kernels::dot(ap, p).real();
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    const double rr_next = kernels::norm_sq(r);
    const double beta = rr_next / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_next;
    ++stats.iterations;
  }
  stats.relative_residual = std::sqrt(rr) / bnorm;
  stats.converged = stats.relative_residual <= tol;
  return stats;
}

namespace {

// One Krylov exponential attempt; returns the error estimate relative to
// ||u||. The subspace stops growing once the estimate drops below tol.
double lanczos_once(const LinearMap& h, double dt, std::span<const cplx> u,
                    std::span<cplx> out, int m, double tol, int& used_dim) {
  const std::size_t n = u.size();
  const double unorm = norm(u);
  std::fill(out.begin(), out.end(), cplx(0.0));
  used_dim = 0;
  if (unorm == 0.0) return 0.0;
  std::vector<CVec> v;
  v.reserve(m + 1);
  v.emplace_back(u.begin(), u.end());
  for (auto& c : v[0]) c /= unorm;
  std::vector<double> alpha, beta;
  CVec w(n);
  Eigen::VectorXcd coeff;
  auto solve_small = [&](int k) {
    Eigen::VectorXd diag(k), sub(std::max(k - 1, 0));
    for (int i = 0; i < k; ++i) diag(i) = alpha[i];
    for (int i = 0; i + 1 < k; ++i) sub(i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& q = eig.eigenvectors();
    coeff.resize(k);
    for (int i = 0; i < k; ++i) {
      cplx s = 0.0;
      for (int l = 0; l < k; ++l)
        s += q(i, l) * std::polar(1.0, -dt * eig.eigenvalues()(l)) * q(0, l);
      coeff(i) = s;
    }
  };
  double err = 0.0;
  for (int j = 0; j < m; ++j) {
    h(v[j], w);
    const double a = kernels::dot(w, v[j]).real();
    alpha.push_back(a);
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= j; ++i) axpy(-kernels::dot(w, v[i]), v[i], w);
    const double b = norm(w);
    const int k = j + 1;
    used_dim = k;
    if (b < 1e-14 * (std::abs(a) + 1.0)) {
      solve_small(k);
      err = 0.0;
      break;
    }
    if (k == m || (k >= 4 && k % 2 == 0)) {
      solve_small(k);
      err = std::abs(dt) * b * std::abs(coeff(k - 1));
      if (err <= tol || k == m) break;
    }
    beta.push_back(b);
    v.emplace_back(w);
    for (auto& c : v.back()) c /= b;
  }
  for (int i = 0; i < used_dim; ++i) axpy(unorm * coeff(i), v[i], out);
  return err;
}

}  // namespace

KrylovStats lanczos_expm(const LinearMap& hermitian, double dt,
                         std::span<const cplx> u, std::span<cplx> out,
                         int krylov_dim, double tol) {
  KrylovStats stats;
  int pieces = 1;
  CVec current(u.begin(), u.end()), next(u.size());
  for (;;) {
    current.assign(u.begin(), u.end());
    double worst = 0.0;
    bool ok = true;
    for (int p = 0; p < pieces; ++p) {
      int used = 0;
      const double err = lanczos_once(hermitian, dt / pieces, current, next,
                                      krylov_dim, tol / pieces, used);
      stats.max_dim = std::max(stats.max_dim, used);
      worst = std::max(worst, err);
      if (err > tol / pieces) {
        ok = false;
        break;
      }
      current.swap(next);
    }
    if (ok) {
      stats.substeps = pieces;
      stats.error_estimate = worst;
      std::copy(current.begin(), current.end(), out.begin());
      return stats;
    }
    pieces *= 2;
    if (pieces > 4096)
      throw SolverError("lanczos_expm: Krylov subspace never converged");
  }
}

NormEstimate estimate_operator_norm(const LinearMap& op,
                                    const LinearMap& adjoint, std::size_t n,
                                    int n_probe, int iterations,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int k = n_probe;
  Eigen::MatrixXcd block(n, k), image(n, k);
  for (int c = 0; c < k; ++c)
    for (std::size_t i = 0; i < n; ++i) block(i, c) = {normal(rng), normal(rng)};

  CVec in(n), out(n), back(n);
  auto apply_block = [&](const Eigen::MatrixXcd& src, Eigen::MatrixXcd& dst,
                         const LinearMap& map) {
    for (int c = 0; c < k; ++c) {
      for (std::size_t i = 0; i < n; ++i) in[i] = src(i, c);
      map(in, out);
      for (std::size_t i = 0; i < n; ++i) dst(i, c) = out[i];
    }
  };

  NormEstimate est;
  est.probes = k;
  for (int it = 0; it <= iterations; ++it) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(block);
    block = qr.householderQ() * Eigen::MatrixXcd::Identity(n, k);
    apply_block(block, image, op);
    // Ritz values of A^dagger A on span(block): singular values of A*block.
    Eigen::MatrixXcd gram = image.adjoint() * image;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
    est.value = std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
    est.iterations = it;
    if (it == iterations) break;
    apply_block(image, block, adjoint);
  }
  return est;
}

}  // namespace tdse
