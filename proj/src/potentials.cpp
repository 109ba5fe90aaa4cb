#include "tdse/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace tdse {

PotentialFamily::PotentialFamily(FamilyDefinition def) : def_(std::move(def)) {
  if (def_.dim < 1 || def_.dim > 2)
    throw InvalidFamily(def_.name + ": dim must be 1 or 2");
  if (!(def_.mass > 0.0)) throw InvalidFamily(def_.name + ": mass must be > 0");
  if (def_.growth_order < 0.0)
    throw InvalidFamily(def_.name + ": growth order M must be >= 0");
  if (!(def_.rho_range.lo < def_.rho_range.hi))
    throw InvalidFamily(def_.name + ": empty parameter interval");
  if (!def_.vector.empty() && static_cast<int>(def_.vector.size()) != def_.dim)
    throw InvalidFamily(def_.name + ": vector potential needs one component per axis");

  v_ = Expression::parse(def_.scalar, def_.dim);
  for (int j = 0; j < def_.dim; ++j)
    a_.push_back(def_.vector.empty() ? Expression()
                                     : Expression::parse(def_.vector[j], def_.dim));
  v_t_ = v_.derivative(Var::t);
  v_rho_ = v_.derivative(Var::rho);
  const Var axes1[] = {Var::x};
  const Var axes2[] = {Var::x1, Var::x2};
  const Var* axes = def_.dim == 1 ? axes1 : axes2;
  div_a_ = Expression();
  for (int j = 0; j < def_.dim; ++j) {
    a_t_.push_back(a_[j].derivative(Var::t));
    a_rho_.push_back(a_[j].derivative(Var::rho));
    div_a_ = div_a_ + a_[j].derivative(axes[j]);
    magnetic_ = magnetic_ || !a_[j].is_zero();
    rho_dependent_ = rho_dependent_ || !a_rho_[j].is_zero();
  }
  rho_dependent_ = rho_dependent_ || !v_rho_.is_zero();
}

VarValues PotentialFamily::bind(double t, std::span<const double> x,
                                double rho) const {
  VarValues vars;
  vars[Var::t] = t;
  vars[Var::rho] = rho;
  if (def_.dim == 1) {
    vars[Var::x] = x[0];
  } else {
    vars[Var::x1] = x[0];
    vars[Var::x2] = x[1];
  }
  return vars;
}

namespace {

void require_dim(const PotentialFamily& fam, const SpatialGrid& grid) {
  if (fam.dim() != grid.dim())
    throw GridMismatch(fam.name() + ": family dimension differs from grid");
}

PotentialSamples sample(const PotentialFamily& fam, double t, double rho,
                        const SpatialGrid& grid, const Expression& scalar,
                        const std::vector<const Expression*>& vector) {
  require_dim(fam, grid);
  PotentialSamples out;
  const std::size_t n = grid.size();
  out.scalar.resize(n);
  out.vector.assign(fam.dim(), RVec(n, 0.0));
  double x[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coordinate(i, a);
    const VarValues vars = fam.bind(t, {x, static_cast<std::size_t>(grid.dim())}, rho);
    out.scalar[i] = scalar.eval(vars);
    if (!std::isfinite(out.scalar[i]))
      throw InvalidFamily(fam.name() + ": non-finite scalar potential at x = " +
                          std::to_string(x[0]));
    for (int j = 0; j < fam.dim(); ++j) {
      if (vector[j]->is_zero()) continue;
      out.vector[j][i] = vector[j]->eval(vars);
      if (!std::isfinite(out.vector[j][i]))
        throw InvalidFamily(fam.name() + ": non-finite vector potential at x = " +
                            std::to_string(x[0]));
    }
  }
  return out;
}

}  // namespace

PotentialSamples eval_potential(const PotentialFamily& fam, double t,
                                double rho, const SpatialGrid& grid) {
  std::vector<const Expression*> a;
  for (int j = 0; j < fam.dim(); ++j) a.push_back(&fam.vector(j));
  return sample(fam, t, rho, grid, fam.scalar(), a);
}

PotentialSamples partial_rho(const PotentialFamily& fam, double t, double rho,
                             const SpatialGrid& grid) {
  std::vector<const Expression*> a;
  for (int j = 0; j < fam.dim(); ++j) a.push_back(&fam.vector_drho(j));
  return sample(fam, t, rho, grid, fam.scalar_drho(), a);
}

RVec eval_divergence(const PotentialFamily& fam, double t, double rho,
                     const SpatialGrid& grid) {
  std::vector<const Expression*> zero(fam.dim(), nullptr);
  Expression none;
  for (auto& p : zero) p = &none;
  return sample(fam, t, rho, grid, fam.divergence(), zero).scalar;
}

double InteractionFamily::eval(double t, double r, double rho) const {
  VarValues vars;
  vars[Var::t] = t;
  vars[Var::r] = r;
  vars[Var::rho] = rho;
  return potential.eval(vars);
}

InteractionFamily make_interaction(std::string name, const std::string& text,
                                   double growth_exponent, double delta) {
  InteractionFamily w;
  w.name = std::move(name);
  w.potential = Expression::parse(text, 1);
  if (w.potential.depends_on(Var::x) || w.potential.depends_on(Var::x1) ||
      w.potential.depends_on(Var::x2))
    throw InvalidFamily(w.name + ": interaction may only use t, r and rho");
  w.growth_exponent = growth_exponent;
  w.delta = delta;
  return w;
}

// Catalog ------------------------------------------------------------------

const std::vector<FamilyDefinition>& builtin_definitions() {
  static const std::vector<FamilyDefinition> defs = {
      {"harmonic", 1, "x^2/2", {}, 0.0, 1.0, 1.0, {-1.0, 1.0}},
      {"confined_quartic", 1, "(2 + sin(t))*(1 + x^2)^2", {"cos(t)*<x>"}, 1.0,
       1.0, 1.0, {-1.0, 1.0}},
      {"anharmonic_rho", 1, "x^2/2 + rho*x^4/4", {}, 1.0, 1.0, 1.0, {0.25, 4.0}},
      {"oscillating_quartic", 1, "(2 + sin(x))*(1 + x^2)^2", {}, 1.0, 1.0, 1.0,
       {-1.0, 1.0}},
      {"magnetic_quartic_2d", 2, "(1 + x1^2 + x2^2)^2", {"-x2/2", "x1/2"}, 1.0,
       1.0, 1.0, {-1.0, 1.0}},
  };
  return defs;
}

bool is_builtin_family(const std::string& name) {
  for (const auto& d : builtin_definitions())
    if (d.name == name) return true;
  return false;
}

PotentialFamily builtin_family(const std::string& name) {
  for (const auto& d : builtin_definitions())
    if (d.name == name) return PotentialFamily(d);
  throw std::out_of_range("unknown potential family '" + name + "'");
}

PotentialFamily time_switched_quartic(double growth_order) {
  return PotentialFamily({"time_switched_quartic", 1, "t*x^4 + x^2", {},
                          growth_order, 1.0, 1.0, {-1.0, 1.0}});
}

// Validation ---------------------------------------------------------------

double central_difference(const std::function<double(double)>& f, double x,
                          int order, double h) {
  if (order == 0) return f(x);
  double acc = 0.0, binom = 1.0;
  for (int i = 0; i <= order; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    acc += sign * binom * f(x + (0.5 * order - i) * h);
    binom = binom * (order - i) / (i + 1);
  }
  return acc / std::pow(h, order);
}

namespace {

constexpr double kFdStep = 1e-2;
// Finite differences below this multiple of |f| / h^|alpha| are roundoff.
constexpr double kFdNoise = 1e-13;
constexpr int kFitShells = 3;

using PointFn = std::function<double(std::span<const double>)>;

double fd_multi(const PointFn& f, std::vector<double> x,
                std::span<const int> alpha, std::size_t axis = 0) {
  if (axis == alpha.size()) return f(x);
  auto along = [&](double xi) {
    std::vector<double> y = x;
    y[axis] = xi;
    return fd_multi(f, y, alpha, axis + 1);
  };
  return central_difference(along, x[axis], alpha[axis], kFdStep);
}

std::vector<std::vector<int>> multi_indices(int dim, int lo, int hi) {
  std::vector<std::vector<int>> out;
  if (dim == 1) {
    for (int a = lo; a <= hi; ++a) out.push_back({a});
  } else {
    for (int total = lo; total <= hi; ++total)
      for (int a = 0; a <= total; ++a) out.push_back({a, total - a});
  }
  return out;
}

struct Sample {
  double ratio;
  double r;
  Witness where;
};

struct ShellStats {
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
  double r_lo = std::numeric_limits<double>::infinity();
  double r_hi = 0.0;
  Witness min_at, max_at;
};

struct RatioSet {
  std::map<int, ShellStats> shells;
  double max_ratio = 0.0;
  Witness max_at;
  bool finite = true;
  Witness nonfinite_at;

  void add(double ratio, double r, const Witness& w) {
    if (!std::isfinite(ratio)) {
      if (finite) nonfinite_at = w;
      finite = false;
      return;
    }
    if (ratio > max_ratio || max_at.x.empty()) {
      max_ratio = std::max(max_ratio, ratio);
      max_at = w;
    }
    if (r < 1.0) return;
    const int k = static_cast<int>(std::floor(std::log2(r)));
    ShellStats& s = shells[k];
    if (ratio < s.min_ratio) {
      s.min_ratio = ratio;
      s.min_at = w;
    }
    if (ratio >= s.max_ratio) {
      s.max_ratio = ratio;
      s.max_at = w;
    }
    s.r_lo = std::min(s.r_lo, r);
    s.r_hi = std::max(s.r_hi, r);
  }

  // Least-squares slope of log(stat) against log(shell radius) over the
  // outermost kFitShells shells.
  double slope(bool use_min) const {
    std::vector<double> lx, ly;
    const int first = shells.empty() ? 0 : shells.rbegin()->first - (kFitShells - 1);
    for (const auto& [k, s] : shells) {
      if (k < first) continue;
      const double v = use_min ? s.min_ratio : s.max_ratio;
      if (!(v > 0.0) || !std::isfinite(v)) continue;
      lx.push_back(0.5 * std::log(s.r_lo * s.r_hi));
      ly.push_back(std::log(v));
    }
    if (lx.size() < 2) return 0.0;
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    const double den = n * sxx - sx * sx;
    return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
  }

  const ShellStats* outermost() const {
    return shells.empty() ? nullptr : &shells.rbegin()->second;
  }
};

struct SamplePoint {
  double t;
  double rho;
  std::vector<double> x;
  double r;
};

std::vector<SamplePoint> sample_points(const SpatialGrid& grid,
                                       std::span<const double> ts,
                                       std::span<const double> rhos) {
  std::vector<SamplePoint> pts;
  for (double t : ts)
    for (double rho : rhos)
      for (std::size_t i = 0; i < grid.size(); ++i) {
        SamplePoint p{t, rho, std::vector<double>(grid.dim()), 0.0};
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
          p.x[a] = grid.coordinate(i, a);
          r2 += p.x[a] * p.x[a];
        }
        p.r = std::sqrt(r2);
        pts.push_back(std::move(p));
      }
  return pts;
}

std::string fmt_exponent(double p) {
  std::string s = std::to_string(p);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

// |g| <= C <x>^p on the sample; g evaluated per sample point.
BoundCheck upper_bound(const std::string& name, const std::string& what,
                       double p, const std::vector<SamplePoint>& pts,
                       const std::function<double(const SamplePoint&)>& g) {
  BoundCheck check;
  check.name = name;
  check.inequality = "|" + what + "| <= C<x>^" + fmt_exponent(p);
  RatioSet set;
  for (const auto& pt : pts) {
    const double w = std::pow(1.0 + pt.r * pt.r, 0.5 * p);
    set.add(std::abs(g(pt)) / w, pt.r, Witness{pt.t, pt.x, pt.rho});
  }
  check.constant = set.max_ratio;
  check.slope = set.slope(false);
  check.witness = set.max_at;
  if (!set.finite) {
    check.pass = false;
    check.reason = "non-finite value";
    check.witness = set.nonfinite_at;
  } else if (check.slope > kShellSlopeTolerance) {
    check.pass = false;
    check.reason = "ratio grows across dyadic shells (slope " +
                   std::to_string(check.slope) + ")";
    if (const ShellStats* s = set.outermost()) check.witness = s->max_at;
  }
  return check;
}

}  // namespace

ValidationReport validate_assumption(const PotentialFamily& fam,
                                     const SpatialGrid& grid,
                                     std::span<const double> t_samples,
                                     std::span<const double> rho_samples,
                                     int alpha_max) {
  require_dim(fam, grid);
  if (alpha_max < 1 || alpha_max > 4)
    throw std::invalid_argument("validate_assumption: alpha_max must be in [1, 4]");
  if (t_samples.empty() || rho_samples.empty())
    throw std::invalid_argument("validate_assumption: empty sample set");

  ValidationReport rep;
  rep.family = fam.name();
  rep.nodes = static_cast<int>(grid.size());
  rep.time_samples = static_cast<int>(t_samples.size());
  rep.rho_samples = static_cast<int>(rho_samples.size());
  rep.alpha_max = alpha_max;
  rep.slope_tolerance = kShellSlopeTolerance;

  const double m = fam.growth_order();
  const double p_v = 2.0 * (m + 1.0);
  const double p_a = m + 1.0;
  const auto pts = sample_points(grid, t_samples, rho_samples);
  const int d = fam.dim();

  auto eval_at = [&](const Expression& e, const SamplePoint& pt,
                     std::span<const double> x) {
    return e.eval(fam.bind(pt.t, x, pt.rho));
  };
  auto derivative = [&](const Expression& e, const std::vector<int>& alpha) {
    return [&, alpha](const SamplePoint& pt) {
      PointFn f = [&](std::span<const double> x) { return eval_at(e, pt, x); };
      const double d = fd_multi(f, pt.x, alpha);
      int order = 0;
      for (int a : alpha) order += a;
      if (order == 0) return d;
      const double floor = kFdNoise * (1.0 + std::abs(f(pt.x))) / std::pow(kFdStep, order);
      return std::abs(d) <= floor ? 0.0 : d;
    };
  };

  // Two-sided growth of V.
  {
    RatioSet set;
    for (const auto& pt : pts) {
      const double w = std::pow(1.0 + pt.r * pt.r, 0.5 * p_v);
      set.add(eval_at(fam.scalar(), pt, pt.x) / w, pt.r,
              Witness{pt.t, pt.x, pt.rho});
    }
    BoundCheck lower, upper;
    lower.name = "scalar lower growth";
    lower.inequality = "C0<x>^" + fmt_exponent(p_v) + " - C1 <= V";
    upper.name = "scalar upper growth";
    upper.inequality = "V <= C2<x>^" + fmt_exponent(p_v);
    if (!set.finite) {
      lower.pass = upper.pass = false;
      lower.reason = upper.reason = "non-finite value";
      lower.witness = upper.witness = set.nonfinite_at;
    } else {
      // C0: smallest ratio over the outer half of the box.
      double c0 = std::numeric_limits<double>::infinity();
      Witness c0_at;
      const double outer = 0.5 * grid.half_width();
      for (const auto& pt : pts) {
        if (pt.r < outer) continue;
        const double ratio =
            eval_at(fam.scalar(), pt, pt.x) / std::pow(1.0 + pt.r * pt.r, 0.5 * p_v);
        if (ratio < c0) {
          c0 = ratio;
          c0_at = Witness{pt.t, pt.x, pt.rho};
        }
      }
      double c1 = 0.0;
      for (const auto& pt : pts) {
        const double w = std::pow(1.0 + pt.r * pt.r, 0.5 * p_v);
        c1 = std::max(c1, c0 * w - eval_at(fam.scalar(), pt, pt.x));
      }
      rep.c0 = c0;
      rep.c1 = c1;
      rep.c2 = set.max_ratio;
      lower.constant = c0;
      lower.slope = set.slope(true);
      lower.witness = c0_at;
      upper.constant = set.max_ratio;
      upper.slope = set.slope(false);
      upper.witness = set.max_at;
      if (!(c0 > 0.0)) {
        lower.pass = false;
        lower.reason = "no positive C0 on the outer half of the box";
      } else if (lower.slope < -kShellSlopeTolerance) {
        lower.pass = false;
        lower.reason = "V / <x>^" + fmt_exponent(p_v) +
                       " decays across dyadic shells (slope " +
                       std::to_string(lower.slope) + ")";
        if (const ShellStats* s = set.outermost()) lower.witness = s->min_at;
      }
      if (!(set.max_ratio > 0.0)) {
        upper.pass = false;
        upper.reason = "no positive C2";
      } else if (upper.slope > kShellSlopeTolerance) {
        upper.pass = false;
        upper.reason = "V / <x>^" + fmt_exponent(p_v) +
                       " grows across dyadic shells (slope " +
                       std::to_string(upper.slope) + ")";
        if (const ShellStats* s = set.outermost()) upper.witness = s->max_at;
      }
    }
    rep.checks.push_back(lower);
    rep.checks.push_back(upper);
  }

  for (const auto& alpha : multi_indices(d, 1, alpha_max))
    rep.checks.push_back(upper_bound("scalar x-derivative", "d^alpha V", p_v, pts,
                                     derivative(fam.scalar(), alpha)));
  for (const auto& alpha : multi_indices(d, 0, alpha_max))
    rep.checks.push_back(upper_bound("scalar time derivative", "d^alpha dt V",
                                     p_v, pts, derivative(fam.scalar_dt(), alpha)));

  for (int j = 0; j < d; ++j) {
    BoundCheck a = upper_bound("vector growth", "A_" + std::to_string(j),
                               p_a - fam.delta(), pts,
                               derivative(fam.vector(j), std::vector<int>(d, 0)));
    if (!(fam.delta() > 0.0)) {
      a.pass = false;
      a.reason = "margin delta must be > 0 (declared " +
                 std::to_string(fam.delta()) + ")";
    }
    rep.checks.push_back(a);
    for (const auto& alpha : multi_indices(d, 1, alpha_max))
      rep.checks.push_back(upper_bound("vector x-derivative", "d^alpha A", p_a,
                                       pts, derivative(fam.vector(j), alpha)));
    for (const auto& alpha : multi_indices(d, 0, alpha_max))
      rep.checks.push_back(upper_bound("vector time derivative",
                                       "d^alpha dt A", p_a, pts,
                                       derivative(fam.vector_dt(j), alpha)));
  }

  if (fam.depends_on_rho()) {
    for (const auto& alpha : multi_indices(d, 0, alpha_max))
      rep.checks.push_back(upper_bound("scalar parameter derivative",
                                       "d^alpha drho V", p_v, pts,
                                       derivative(fam.scalar_drho(), alpha)));
    for (int j = 0; j < d; ++j)
      for (const auto& alpha : multi_indices(d, 0, alpha_max))
        rep.checks.push_back(upper_bound("vector parameter derivative",
                                         "d^alpha drho A", p_a, pts,
                                         derivative(fam.vector_drho(j), alpha)));
  }

  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

ValidationReport validate_interaction(const InteractionFamily& w,
                                      const SpatialGrid& grid,
                                      std::span<const double> t_samples,
                                      std::span<const double> rho_samples,
                                      int alpha_max) {
  if (alpha_max < 1 || alpha_max > 4)
    throw std::invalid_argument("validate_interaction: alpha_max must be in [1, 4]");
  const SpatialGrid line = make_grid(1, grid.half_width(), grid.points());
  ValidationReport rep;
  rep.family = w.name;
  rep.nodes = line.points();
  rep.time_samples = static_cast<int>(t_samples.size());
  rep.rho_samples = static_cast<int>(rho_samples.size());
  rep.alpha_max = alpha_max;
  rep.slope_tolerance = kShellSlopeTolerance;
  const auto pts = sample_points(line, t_samples, rho_samples);
  const double p_full = w.growth_exponent + w.delta;

  auto deriv = [&](int order) {
    return [&, order](const SamplePoint& pt) {
      auto f = [&](double r) { return w.eval(pt.t, r, pt.rho); };
      return central_difference(f, pt.x[0], order, kFdStep);
    };
  };
  BoundCheck growth = upper_bound("interaction growth", "W", w.growth_exponent,
                                  pts, deriv(0));
  if (!(w.delta > 0.0)) {
    growth.pass = false;
    growth.reason = "margin delta must be > 0";
  }
  rep.checks.push_back(growth);
  for (int k = 1; k <= alpha_max; ++k)
    rep.checks.push_back(upper_bound("interaction derivative", "d^alpha W",
                                     p_full, pts, deriv(k)));
  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

}  // namespace tdse
