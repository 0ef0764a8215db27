#pragma once

// Experiment configuration shared by all subcommands.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "nlab/config.hpp"
#include "nlab/dulac.hpp"
#include "nlab/exponents.hpp"
#include "nlab/poincare.hpp"
#include "nlab/statistics.hpp"

namespace nlab::cli {

struct SweepBlock {
  double x_min = 1e-5;
  double x_max = 1e-4;
  std::size_t n_points = 250;
  Spacing spacing = Spacing::Log;
  LeafAnchors anchors;
  double zeta_hat = 1.0;
  double budget_factor = 10.0;
  double success_fraction = 0.9;
};

struct FitBlock {
  AdjustmentMethod method = AdjustmentMethod::FixedExponent;
  /// Sweep size used by beta2-fit when the config does not set sweep.n_points.
  std::size_t beta2_points = 50;
};

struct PoincareBlock {
  double a_exp = 1.6;
  double c_asym = 1.12;
  double zeta = 0.133;
  /// "none", "table" (tabulated from a Dulac sweep) or "auto" (table for models 2 and 3).
  std::string q = "auto";
  std::size_t q_points = 24;
  double tau2 = 1.0;
};

struct OrbitBlock {
  std::size_t n = 1000;
  double x0 = 0.3;
  double y0 = 0.1;
  std::size_t grid_nx = 20;
  std::size_t grid_ny = 11;
  std::size_t g3_iterations = 10;
  std::size_t histogram_bins = 100;
};

struct TailsBlock {
  /// Flow-time constant for the roof; falls back to poincare.zeta.
  std::optional<double> zeta;
  std::size_t n_iterates = 10'000'000;
  std::size_t burn_in = 10'000;
  std::size_t chunks = 64;
  double t_min = 10.0;
  double t_max = 1e5;
  std::size_t n_thresholds = 41;
  FitWindow window{1e2, 1e4};
  std::size_t min_tail_count = 50;
  UndersamplingPolicy policy = UndersamplingPolicy::Warn;
};

struct CorrelationsBlock {
  std::optional<double> zeta;
  ObservableSpec v;
  ObservableSpec w;
  std::size_t n_samples = 1'000'000;
  double dt = 1.0;
  double t_max = 1e3;
  std::size_t n_times = 31;
  std::size_t chunks = 32;
  std::size_t burn_in = 10'000;
  FitWindow window{10.0, 1e3};
};

struct RunBlock {
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::string out = "out";
};

struct ExperimentConfig {
  explicit ExperimentConfig(NeutralParams p) : params(std::move(p)) {}

  NeutralParams params;
  SweepBlock sweep;
  bool sweep_points_set = false;
  IntegratorConfig integrator;
  FitBlock fit;
  PoincareBlock poincare;
  OrbitBlock orbit;
  TailsBlock tails;
  CorrelationsBlock correlations;
  RunBlock run;

  /// Throws ConfigError anchored at the offending line.
  static ExperimentConfig from_ini(const IniDocument& doc);
  /// Canonical document; from_ini(to_ini()) reproduces this config.
  IniDocument to_ini() const;

  DulacOptions dulac_options() const;
  /// Poincare parameters with an optional flow-time override and q function.
  PoincareParams poincare_params(std::optional<double> zeta = std::nullopt,
                                 std::optional<QFunction> q = std::nullopt) const;
  bool wants_q_table() const;
};

}  // namespace nlab::cli
