#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdse/propagator.hpp"

namespace tdse {

/// A configuration problem; field() is the dotted path of the culprit.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct GridConfig {
  int dim = 1;
  double half_width = 10.0;
  int points = 256;
};

struct InitialState {
  std::vector<double> center;
  double width = 1.0;
  std::vector<double> momentum;
};

struct PropagateSettings {
  std::vector<int> orders{1, 2};
  double drift_tol = 1e-7;
  bool refine = true;  ///< also run at dt/2 and compare energy fits
  double stability_tol = 0.2;
};

struct EpsSweepSettings {
  std::vector<double> eps{1.0, 0.5, 0.25, 0.125, 0.0625};
  std::optional<double> mu;  ///< default: scanned mu_min
  double final_tol = 1e-3;
  int norm_order = 1;
  double uniform_spread = 10.0;
};

struct ParametrixSettings {
  double t = 0.0;
  double offset_start = 10.0;  ///< first mu - C1*
  double decades = 1.0;
  int points = 6;
  int n_probe = 16;
  int iterations = 12;
  double target_slope = -0.5;
  double slope_tol = 0.15;
};

struct CommutatorSettings {
  double t = 0.0;
  std::optional<double> mu;
  std::vector<double> eps{1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  int n_probe = 16;
  int iterations = 12;
  double max_spread = 10.0;
};

struct SensitivitySettings {
  std::vector<double> taus{1e-1, 1e-2, 1e-3};
  int a = 0;
  std::vector<double> rho_samples;  ///< for the bound-constant stability check
  double min_order = 1.8;
  double c_spread = 1.5;
  double quotient_factor = 2.0;
};

struct ContinuitySettings {
  std::vector<double> deltas{1e-1, 1e-2, 1e-3};
  int a = 0;
};

struct TwoParticleSettings {
  std::vector<std::string> families{"confined_quartic", "confined_quartic"};
  std::string interaction = "rho*(1 + r^2)";
  double interaction_growth = 2.0;
  double interaction_delta = 2.0;
  double rho = 0.1;
  Interval rho_range{-1.0, 1.0};
  double half_width = 8.0;
  int points = 128;
  std::vector<double> centers{-1.0, 1.0};
  double width = 1.0;
  double T = 0.5;
  double dt = 1e-3;
  std::vector<int> orders{1};
  double drift_tol = 1e-7;
  bool factorization = true;
  double factor_tol = 1e-6;
};

struct ValidateSettings {
  std::vector<double> t_samples;    ///< default: 5 points on [0, T]
  std::vector<double> rho_samples;  ///< default: 3 interior points of the range
  int alpha_max = 4;
  bool counterexample = false;  ///< also expect the time-switched quartic to FAIL
};

struct ExperimentConfig {
  FamilyDefinition family;
  double rho = 0.0;
  GridConfig grid;
  PropagatorConfig propagator;
  InitialState initial;
  std::vector<std::string> suites;
  std::filesystem::path output = "out";
  std::uint64_t seed = 1;
  int workers = 1;

  PropagateSettings propagate;
  EpsSweepSettings eps_sweep;
  ParametrixSettings parametrix;
  CommutatorSettings commutator;
  SensitivitySettings sensitivity;
  ContinuitySettings continuity;
  TwoParticleSettings two_particle;
  ValidateSettings validate;
};

const std::vector<std::string>& suite_names();

/// Parses YAML text; throws ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

SpatialGrid make_grid(const GridConfig& g);
WaveFunction make_initial_state(const InitialState& s, const SpatialGrid& grid);

}  // namespace tdse
