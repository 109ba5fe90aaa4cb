#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tdse/operators.hpp"

namespace tdse {

enum class Scheme { crank_nicolson, lanczos };

struct PropagatorConfig {
  Scheme scheme = Scheme::crank_nicolson;
  double dt = 1e-3;
  double T = 1.0;
  double solver_tol = 1e-12;
  int max_iter = 600;
  int krylov_dim = 40;
  std::optional<CutoffSpec> cutoff;  ///< regularized flow when set
  double boundary_tol = 1e-6;
  int record_every = 1;
  int save_every = 0;  ///< 0: keep only the initial and final states
};

/// Throws std::invalid_argument unless dt > 0, T/dt is an integer and the
/// tolerances are positive.
int step_count(const PropagatorConfig& cfg);

struct StepInfo {
  int iterations = 0;
  double residual = 0.0;
};

/// Source term sampled at a time: out = f(t).
using Source = std::function<void(double t, std::span<cplx> out)>;

/// One step from t to t + dt with H frozen at the midpoint t + dt/2. dt may
/// be negative. If source_mid is given it is f(t + dt/2). Throws SolverError.
StepInfo step(const PropagatorConfig& cfg, const Evolution& evo, double t,
              double dt, std::span<const cplx> u, std::span<cplx> out,
              std::span<const cplx> source_mid = {});

/// A norm recorded along a run.
struct NormProbe {
  std::string label;
  std::function<double(const WaveFunction&)> eval;
};

struct StepRecord {
  double t = 0.0;
  double l2 = 0.0;
  std::vector<double> weighted;
  double boundary_mass = 0.0;
  double step_residual = 0.0;
  int iterations = 0;
};

struct PropagationRun {
  std::vector<std::string> norm_labels;
  std::vector<StepRecord> records;
  std::vector<double> save_times;
  std::vector<WaveFunction> states;
  WaveFunction final_state;
  int steps = 0;
  int total_iterations = 0;
  double max_boundary_mass = 0.0;
  bool boundary_flag = false;

  /// max_t | ||u(t)|| - ||u0|| |
  double max_norm_drift() const;
  /// max_t ||u(t)||_a / ||u0||_a for the k-th recorded norm.
  double max_ratio(std::size_t k) const;
};

/// Generic driver over any generator; source may be empty.
PropagationRun propagate_flow(const PropagatorConfig& cfg, const Evolution& evo,
                              const WaveFunction& u0,
                              std::span<const NormProbe> norms = {},
                              const Source& source = {});

/// Norm probes ||.||_a for each a with the family's growth order and mass.
std::vector<NormProbe> weighted_norm_probes(const HamiltonianHandle& h,
                                            std::span<const int> orders);

/// Solves i u' = H u (or H_eps u when cfg.cutoff is set).
PropagationRun propagate(const PropagatorConfig& cfg, const HamiltonianHandle& h,
                         const WaveFunction& u0, std::span<const int> orders = {});

/// Solves i u' = H u + f(t), f sampled at half steps.
PropagationRun propagate_inhomogeneous(const PropagatorConfig& cfg,
                                       const HamiltonianHandle& h,
                                       const WaveFunction& u0, const Source& f,
                                       std::span<const int> orders = {});

struct EnergyFit {
  std::string label;
  double c = 0.0;          ///< smallest C with ||u(t)||_a <= e^{Ct} ||u0||_a
  double max_ratio = 0.0;  ///< max_t ||u(t)||_a / ||u0||_a
  bool finite = false;
};

EnergyFit energy_estimate_check(const PropagationRun& run, std::size_t k);

struct EnergyComparison {
  EnergyFit coarse, fine;
  double ratio_change = 0.0;  ///< relative change of max_ratio
  bool stable = false;
};

/// Compares fits from dt and dt/2 runs; stable when both are finite and the
/// max ratios agree within rel_tol.
EnergyComparison compare_energy_fits(const EnergyFit& coarse,
                                     const EnergyFit& fine, double rel_tol = 0.2);

}  // namespace tdse
