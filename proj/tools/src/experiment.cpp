#include "nlab_cli/experiment.hpp"

#include <cmath>

#include "nlab/errors.hpp"

namespace nlab::cli {

namespace {

std::size_t get_count(const IniDocument& doc, const std::string& sec, const std::string& key, std::size_t fallback,
                      std::size_t min_value) {
  const long long v = doc.get_int(sec, key, static_cast<long long>(fallback));
  if (v < static_cast<long long>(min_value)) {
    throw ConfigError("'" + key + "' must be at least " + std::to_string(min_value), doc.line_of(sec, key));
  }
  return static_cast<std::size_t>(v);
}

double get_positive(const IniDocument& doc, const std::string& sec, const std::string& key, double fallback) {
  const double v = doc.get_double(sec, key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError("'" + key + "' must be a positive number", doc.line_of(sec, key));
  }
  return v;
}

FitWindow get_window(const IniDocument& doc, const std::string& sec, FitWindow fallback) {
  FitWindow w{get_positive(doc, sec, "fit_lo", fallback.lo), get_positive(doc, sec, "fit_hi", fallback.hi)};
  if (!(w.lo < w.hi)) throw ConfigError("fit_lo must be below fit_hi", doc.line_of(sec, "fit_hi"));
  return w;
}

ObservableSpec get_observable(const IniDocument& doc, const std::string& sec, const std::string& key) {
  const std::string name = doc.get_string(sec, key, "odd_bump");
  ObservableSpec o;
  try {
    o = observable_from_string(name);
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what(), doc.line_of(sec, key));
  }
  o.center = doc.get_double(sec, "center", o.center);
  o.width = get_positive(doc, sec, "width", o.width);
  o.value = doc.get_double(sec, key + "_value", o.value);
  return o;
}

std::string observable_name(const ObservableSpec& o) {
  switch (o.kind) {
    case ObservableKind::OddBump: return "odd_bump";
    case ObservableKind::EvenBump: return "even_bump";
    case ObservableKind::Constant: return "constant";
  }
  return "odd_bump";
}

}  // namespace

ExperimentConfig ExperimentConfig::from_ini(const IniDocument& doc) {
  ExperimentConfig cfg(params_from_ini(doc, "model"));

  const std::string s = "sweep";
  cfg.sweep.x_min = doc.get_double(s, "x_min", cfg.sweep.x_min);
  cfg.sweep.x_max = doc.get_double(s, "x_max", cfg.sweep.x_max);
  cfg.sweep_points_set = doc.has(s, "n_points");
  cfg.sweep.n_points = get_count(doc, s, "n_points", cfg.sweep.n_points, 1);
  if (!(cfg.sweep.x_min > 0.0)) {
    throw ConfigError("x_min must be positive (the sweep needs 0 < x_min < x_max <= 1)", doc.line_of(s, "x_min"));
  }
  if (!(cfg.sweep.x_max <= 1.0)) throw ConfigError("x_max must not exceed 1", doc.line_of(s, "x_max"));
  if (!(cfg.sweep.x_min < cfg.sweep.x_max)) {
    const int line = doc.line_of(s, "x_min") ? doc.line_of(s, "x_min") : doc.line_of(s, "x_max");
    throw ConfigError("x_min must be below x_max", line);
  }
  const std::string spacing = doc.get_string(s, "spacing", "log");
  if (spacing == "log") {
    cfg.sweep.spacing = Spacing::Log;
  } else if (spacing == "linear") {
    cfg.sweep.spacing = Spacing::Linear;
  } else {
    throw ConfigError("spacing must be 'log' or 'linear'", doc.line_of(s, "spacing"));
  }
  cfg.sweep.anchors.y0 = doc.get_double(s, "y0", cfg.sweep.anchors.y0);
  cfg.sweep.anchors.z0 = doc.get_double(s, "z0", cfg.sweep.anchors.z0);
  cfg.sweep.zeta_hat = get_positive(doc, s, "zeta_hat", cfg.sweep.zeta_hat);
  cfg.sweep.budget_factor = get_positive(doc, s, "budget_factor", cfg.sweep.budget_factor);
  cfg.sweep.success_fraction = doc.get_double(s, "success_fraction", cfg.sweep.success_fraction);
  if (!(cfg.sweep.success_fraction >= 0.0 && cfg.sweep.success_fraction <= 1.0)) {
    throw ConfigError("success_fraction must lie in [0, 1]", doc.line_of(s, "success_fraction"));
  }

  cfg.integrator = integrator_from_ini(doc, "integrator");

  const std::string f = "fit";
  const std::string method = doc.get_string(f, "method", "fixed_exponent");
  if (method == "fixed_exponent") {
    cfg.fit.method = AdjustmentMethod::FixedExponent;
  } else if (method == "free_intercept") {
    cfg.fit.method = AdjustmentMethod::FreeIntercept;
  } else {
    throw ConfigError("method must be 'fixed_exponent' or 'free_intercept'", doc.line_of(f, "method"));
  }
  cfg.fit.beta2_points = get_count(doc, f, "beta2_points", cfg.fit.beta2_points, 1);

  const std::string p = "poincare";
  cfg.poincare.a_exp = doc.get_double(p, "a_exp", cfg.poincare.a_exp);
  if (!(cfg.poincare.a_exp > 1.0)) throw ConfigError("a_exp must exceed 1", doc.line_of(p, "a_exp"));
  cfg.poincare.c_asym = get_positive(doc, p, "c_asym", cfg.poincare.c_asym);
  cfg.poincare.zeta = get_positive(doc, p, "zeta", cfg.poincare.zeta);
  cfg.poincare.q = doc.get_string(p, "q", cfg.poincare.q);
  if (cfg.poincare.q != "none" && cfg.poincare.q != "table" && cfg.poincare.q != "auto") {
    throw ConfigError("q must be 'none', 'table' or 'auto'", doc.line_of(p, "q"));
  }
  cfg.poincare.q_points = get_count(doc, p, "q_points", cfg.poincare.q_points, 2);
  cfg.poincare.tau2 = get_positive(doc, p, "tau2", cfg.poincare.tau2);

  const std::string o = "orbit";
  cfg.orbit.n = get_count(doc, o, "n", cfg.orbit.n, 1);
  cfg.orbit.x0 = doc.get_double(o, "x0", cfg.orbit.x0);
  cfg.orbit.y0 = doc.get_double(o, "y0", cfg.orbit.y0);
  if (!(std::abs(cfg.orbit.x0) <= 1.0) || !(std::abs(cfg.orbit.y0) <= 1.0)) {
    throw ConfigError("orbit start must lie in [-1, 1]^2", doc.line_of(o, "x0"));
  }
  cfg.orbit.grid_nx = get_count(doc, o, "grid_nx", cfg.orbit.grid_nx, 1);
  cfg.orbit.grid_ny = get_count(doc, o, "grid_ny", cfg.orbit.grid_ny, 2);
  cfg.orbit.g3_iterations = get_count(doc, o, "g3_iterations", cfg.orbit.g3_iterations, 1);
  cfg.orbit.histogram_bins = get_count(doc, o, "histogram_bins", cfg.orbit.histogram_bins, 1);

  const std::string t = "tails";
  if (doc.has(t, "zeta")) cfg.tails.zeta = get_positive(doc, t, "zeta", 1.0);
  cfg.tails.n_iterates = get_count(doc, t, "n_iterates", cfg.tails.n_iterates, 1);
  cfg.tails.burn_in = get_count(doc, t, "burn_in", cfg.tails.burn_in, 0);
  cfg.tails.chunks = get_count(doc, t, "chunks", cfg.tails.chunks, 1);
  cfg.tails.t_min = get_positive(doc, t, "t_min", cfg.tails.t_min);
  cfg.tails.t_max = get_positive(doc, t, "t_max", cfg.tails.t_max);
  if (!(cfg.tails.t_min < cfg.tails.t_max)) throw ConfigError("t_min must be below t_max", doc.line_of(t, "t_max"));
  cfg.tails.n_thresholds = get_count(doc, t, "n_thresholds", cfg.tails.n_thresholds, 3);
  cfg.tails.window = get_window(doc, t, cfg.tails.window);
  cfg.tails.min_tail_count = get_count(doc, t, "min_tail_count", cfg.tails.min_tail_count, 0);
  const std::string policy = doc.get_string(t, "policy", "warn");
  if (policy == "warn") {
    cfg.tails.policy = UndersamplingPolicy::Warn;
  } else if (policy == "throw") {
    cfg.tails.policy = UndersamplingPolicy::Throw;
  } else {
    throw ConfigError("policy must be 'warn' or 'throw'", doc.line_of(t, "policy"));
  }

  const std::string c = "correlations";
  if (doc.has(c, "zeta")) cfg.correlations.zeta = get_positive(doc, c, "zeta", 1.0);
  cfg.correlations.v = get_observable(doc, c, "v");
  cfg.correlations.w = get_observable(doc, c, "w");
  cfg.correlations.n_samples = get_count(doc, c, "n_samples", cfg.correlations.n_samples, 1);
  cfg.correlations.dt = get_positive(doc, c, "dt", cfg.correlations.dt);
  cfg.correlations.t_max = get_positive(doc, c, "t_max", cfg.correlations.t_max);
  cfg.correlations.n_times = get_count(doc, c, "n_times", cfg.correlations.n_times, 2);
  cfg.correlations.chunks = get_count(doc, c, "chunks", cfg.correlations.chunks, 1);
  if (cfg.correlations.n_samples < cfg.correlations.chunks) {
    throw ConfigError("n_samples must be at least chunks", doc.line_of(c, "n_samples"));
  }
  cfg.correlations.burn_in = get_count(doc, c, "burn_in", cfg.correlations.burn_in, 0);
  cfg.correlations.window = get_window(doc, c, cfg.correlations.window);

  const std::string r = "run";
  const long long seed = doc.get_int(r, "seed", static_cast<long long>(cfg.run.seed));
  if (seed < 0) throw ConfigError("seed must be nonnegative", doc.line_of(r, "seed"));
  cfg.run.seed = static_cast<std::uint64_t>(seed);
  cfg.run.workers = static_cast<unsigned>(get_count(doc, r, "workers", cfg.run.workers, 0));
  cfg.run.out = doc.get_string(r, "out", cfg.run.out);
  return cfg;
}

IniDocument ExperimentConfig::to_ini() const {
  IniDocument doc;
  params_to_ini(params, doc, "model");

  const std::string s = "sweep";
  doc.set_double(s, "x_min", sweep.x_min);
  doc.set_double(s, "x_max", sweep.x_max);
  if (sweep_points_set) doc.set(s, "n_points", std::to_string(sweep.n_points));
  doc.set(s, "spacing", sweep.spacing == Spacing::Log ? "log" : "linear");
  doc.set_double(s, "y0", sweep.anchors.y0);
  doc.set_double(s, "z0", sweep.anchors.z0);
  doc.set_double(s, "zeta_hat", sweep.zeta_hat);
  doc.set_double(s, "budget_factor", sweep.budget_factor);
  doc.set_double(s, "success_fraction", sweep.success_fraction);

  integrator_to_ini(integrator, doc, "integrator");

  doc.set("fit", "method", fit.method == AdjustmentMethod::FixedExponent ? "fixed_exponent" : "free_intercept");
  doc.set("fit", "beta2_points", std::to_string(fit.beta2_points));

  const std::string p = "poincare";
  doc.set_double(p, "a_exp", poincare.a_exp);
  doc.set_double(p, "c_asym", poincare.c_asym);
  doc.set_double(p, "zeta", poincare.zeta);
  doc.set(p, "q", poincare.q);
  doc.set(p, "q_points", std::to_string(poincare.q_points));
  doc.set_double(p, "tau2", poincare.tau2);

  const std::string o = "orbit";
  doc.set(o, "n", std::to_string(orbit.n));
  doc.set_double(o, "x0", orbit.x0);
  doc.set_double(o, "y0", orbit.y0);
  doc.set(o, "grid_nx", std::to_string(orbit.grid_nx));
  doc.set(o, "grid_ny", std::to_string(orbit.grid_ny));
  doc.set(o, "g3_iterations", std::to_string(orbit.g3_iterations));
  doc.set(o, "histogram_bins", std::to_string(orbit.histogram_bins));

  const std::string t = "tails";
  if (tails.zeta) doc.set_double(t, "zeta", *tails.zeta);
  doc.set(t, "n_iterates", std::to_string(tails.n_iterates));
  doc.set(t, "burn_in", std::to_string(tails.burn_in));
  doc.set(t, "chunks", std::to_string(tails.chunks));
  doc.set_double(t, "t_min", tails.t_min);
  doc.set_double(t, "t_max", tails.t_max);
  doc.set(t, "n_thresholds", std::to_string(tails.n_thresholds));
  doc.set_double(t, "fit_lo", tails.window.lo);
  doc.set_double(t, "fit_hi", tails.window.hi);
  doc.set(t, "min_tail_count", std::to_string(tails.min_tail_count));
  doc.set(t, "policy", tails.policy == UndersamplingPolicy::Warn ? "warn" : "throw");

  const std::string c = "correlations";
  if (correlations.zeta) doc.set_double(c, "zeta", *correlations.zeta);
  doc.set(c, "v", observable_name(correlations.v));
  doc.set(c, "w", observable_name(correlations.w));
  doc.set_double(c, "v_value", correlations.v.value);
  doc.set_double(c, "w_value", correlations.w.value);
  doc.set_double(c, "center", correlations.v.center);
  doc.set_double(c, "width", correlations.v.width);
  doc.set(c, "n_samples", std::to_string(correlations.n_samples));
  doc.set_double(c, "dt", correlations.dt);
  doc.set_double(c, "t_max", correlations.t_max);
  doc.set(c, "n_times", std::to_string(correlations.n_times));
  doc.set(c, "chunks", std::to_string(correlations.chunks));
  doc.set(c, "burn_in", std::to_string(correlations.burn_in));
  doc.set_double(c, "fit_lo", correlations.window.lo);
  doc.set_double(c, "fit_hi", correlations.window.hi);

  doc.set("run", "seed", std::to_string(run.seed));
  return doc;
}

DulacOptions ExperimentConfig::dulac_options() const {
  DulacOptions o;
  o.integrator = integrator;
  o.zeta_hat = sweep.zeta_hat;
  o.budget_factor = sweep.budget_factor;
  return o;
}

PoincareParams ExperimentConfig::poincare_params(std::optional<double> zeta, std::optional<QFunction> q) const {
  ScalarFn tau2;
  if (poincare.tau2 != 1.0) {
    const double t2 = poincare.tau2;
    tau2 = [t2](double) { return t2; };
  }
  return PoincareParams(params, poincare.a_exp, poincare.c_asym, zeta.value_or(poincare.zeta), std::move(q),
                        std::move(tau2));
}

bool ExperimentConfig::wants_q_table() const {
  if (poincare.q == "table") return params.model() != Model::TwoD;
  if (poincare.q == "auto") return params.model() == Model::Model2 || params.model() == Model::Model3;
  return false;
}

}  // namespace nlab::cli
