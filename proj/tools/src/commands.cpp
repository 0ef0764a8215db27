#include "nlab_cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

#include "nlab/errors.hpp"
#include "nlab/svg.hpp"
#include "nlab_cli/presets.hpp"

namespace nlab::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
  const CommandOptions& opts;
  std::ostream& out;
  fs::path dir;
};

std::ofstream open_output(const Context& ctx, const std::string& name) {
  std::ofstream f(ctx.dir / name, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + (ctx.dir / name).string(), 0);
  return f;
}

void write_figure(const Context& ctx, const std::string& name, PlotSpec spec) {
  if (!ctx.opts.svg) return;
  if (ctx.opts.timestamp) spec.timestamp = utc_timestamp();
  auto f = open_output(ctx, name);
  write_svg(f, spec);
  ctx.out << "wrote " << (ctx.dir / name).string() << '\n';
}

Metadata base_metadata(const std::string& command, const ExperimentConfig& cfg) {
  Metadata meta{{"command", command}};
  const Metadata conf = cfg.to_ini().to_metadata();
  meta.insert(meta.end(), conf.begin(), conf.end());
  return meta;
}

ExperimentConfig resolve(const CommandOptions& opts, const IniDocument& doc) {
  ExperimentConfig cfg = ExperimentConfig::from_ini(doc);
  if (opts.seed) cfg.run.seed = *opts.seed;
  if (opts.workers) cfg.run.workers = *opts.workers;
  if (opts.out_dir) cfg.run.out = *opts.out_dir;
  return cfg;
}

fs::path prepare_dir(const ExperimentConfig& cfg) {
  fs::path dir(cfg.run.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message(), 0);
  return dir;
}

std::size_t count_ok(const std::vector<DulacSample>& samples) {
  std::size_t ok = 0;
  for (const auto& s : samples) ok += s.ok() ? 1 : 0;
  return ok;
}

std::vector<DulacSample> run_sweep(const Context& ctx, const ExperimentConfig& cfg, const std::string& command) {
  const auto grid = make_grid(cfg.sweep.x_min, cfg.sweep.x_max, cfg.sweep.n_points, cfg.sweep.spacing);
  auto samples = sweep(cfg.params, grid, cfg.sweep.anchors, cfg.dulac_options(), cfg.run.workers);
  Metadata meta = base_metadata(command, cfg);
  meta.emplace_back("result.points_ok", std::to_string(count_ok(samples)));
  auto f = open_output(ctx, "sweep.csv");
  write_sweep_csv(f, samples, meta);
  ctx.out << "wrote " << (ctx.dir / "sweep.csv").string() << " (" << count_ok(samples) << "/" << samples.size()
          << " points ok)\n";
  for (const auto& s : samples) {
    if (!s.ok()) ctx.out << "  failed " << format_double(s.x0) << ": " << s.message << '\n';
  }
  return samples;
}

int cmd_dulac_sweep(const Context& ctx, const ExperimentConfig& cfg) {
  const auto samples = run_sweep(ctx, cfg, "dulac-sweep");
  const double frac = static_cast<double>(count_ok(samples)) / static_cast<double>(samples.size());
  if (frac < cfg.sweep.success_fraction) {
    ctx.out << "only " << format_shortest(100.0 * frac) << "% of the points succeeded\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_fit(const Context& ctx, ExperimentConfig cfg, ExponentKind kind, std::vector<DulacSample> samples) {
  const std::string command = kind == ExponentKind::Beta ? "beta-fit" : "beta2-fit";
  if (samples.empty()) samples = run_sweep(ctx, cfg, command);
  const auto e = derived_exponents(cfg.params);
  const ExponentFit fit = kind == ExponentKind::Beta ? fit_adjustment(samples, e.beta, cfg.fit.method)
                                                     : estimate_beta2(samples, e.beta2, cfg.fit.method);
  Metadata meta = base_metadata(command, cfg);
  meta.emplace_back("result.c_fit", format_double(fit.c_fit));
  meta.emplace_back("result.slope_fit", format_double(fit.slope_fit));
  {
    auto f = open_output(ctx, "fit.csv");
    write_fit_csv(f, fit, meta);
  }
  {
    auto f = open_output(ctx, "fit_summary.txt");
    write_fit_summary(f, fit);
  }
  ctx.out << "wrote " << (ctx.dir / "fit.csv").string() << " and fit_summary.txt\n";
  write_fit_summary(ctx.out, fit);
  const std::string symbol = kind == ExponentKind::Beta ? "beta" : "beta2";
  write_figure(ctx, "figure.svg",
               fit_plot(fit, symbol + " estimates (" + std::string(to_string(cfg.params.model())) +
                                 ", theoretical " + format_shortest(std::round(fit.theoretical * 1e4) / 1e4) + ")"));
  return kExitOk;
}

int cmd_orbit(const Context& ctx, const ExperimentConfig& cfg) {
  std::optional<QFunction> q;
  if (cfg.wants_q_table()) {
    const auto grid = make_grid(1e-6, 0.5, cfg.poincare.q_points, Spacing::Log);
    const auto samples = sweep(cfg.params, grid, cfg.sweep.anchors, cfg.dulac_options(), cfg.run.workers);
    q = QTable::from_samples(samples).function();
  }
  const PoincareParams pp = cfg.poincare_params(std::nullopt, q);
  const OrbitResult orbit =
      iterate_orbit(pp, {cfg.orbit.x0, cfg.orbit.y0}, cfg.orbit.n, cfg.run.seed, cfg.orbit.histogram_bins);
  Metadata meta = base_metadata("orbit", cfg);
  meta.emplace_back("result.steps_completed", std::to_string(orbit.steps_completed));
  {
    auto f = open_output(ctx, "orbit.csv");
    write_orbit_csv(f, orbit, meta);
  }
  const GPropertyReport report =
      check_g_properties(pp, sigma_grid(cfg.orbit.grid_nx, cfg.orbit.grid_ny), cfg.orbit.g3_iterations);
  {
    auto f = open_output(ctx, "gprops.txt");
    write_g_report(f, report);
  }
  ctx.out << "wrote " << (ctx.dir / "orbit.csv").string() << " (" << orbit.steps_completed << " rows) and gprops.txt\n";
  write_g_report(ctx.out, report);
  if (orbit.status == OrbitStatus::Escaped) ctx.out << "orbit " << orbit.message << '\n';

  PlotSpec spec;
  spec.title = "return map x(n) -> x(n+1)";
  spec.x_label = "x(n)";
  spec.y_label = "x(n+1)";
  PlotSeries pts{"orbit", "#1f77b4", {}, {}, true};
  for (std::size_t k = 0; k + 1 < orbit.points.size(); ++k) {
    pts.xs.push_back(orbit.points[k].x);
    pts.ys.push_back(orbit.points[k + 1].x);
  }
  spec.series.push_back(std::move(pts));
  write_figure(ctx, "orbit.svg", std::move(spec));
  return kExitOk;
}

int cmd_tails(const Context& ctx, const ExperimentConfig& cfg) {
  const PoincareParams pp = cfg.poincare_params(cfg.tails.zeta);
  TailOptions to;
  to.n_iterates = cfg.tails.n_iterates;
  to.burn_in = cfg.tails.burn_in;
  to.chunks = cfg.tails.chunks;
  to.thresholds = log_space(cfg.tails.t_min, cfg.tails.t_max, cfg.tails.n_thresholds);
  to.window = cfg.tails.window;
  to.min_tail_count = cfg.tails.min_tail_count;
  to.policy = cfg.tails.policy;
  to.seed = cfg.run.seed;
  to.workers = cfg.run.workers;
  const TailEstimate est = return_time_tail(pp, to);

  Metadata meta = base_metadata("tails", cfg);
  meta.emplace_back("result.n_samples", std::to_string(est.n_samples));
  meta.emplace_back("result.fit_window", format_shortest(est.fit_window.lo) + "," + format_shortest(est.fit_window.hi));
  meta.emplace_back("result.fitted_exponent", format_double(est.fitted_exponent));
  meta.emplace_back("result.stderr", format_double(est.std_error));
  meta.emplace_back("result.tail_count", std::to_string(est.tail_count));
  {
    auto f = open_output(ctx, "tail.csv");
    write_tail_csv(f, est, meta);
  }
  {
    auto f = open_output(ctx, "tail_summary.txt");
    f << "beta2: " << format_double(pp.beta2()) << '\n';
    f << "fitted_exponent: " << format_double(est.fitted_exponent) << '\n';
    f << "stderr: " << format_double(est.std_error) << '\n';
    f << "fit_window: " << format_shortest(est.fit_window.lo) << ' ' << format_shortest(est.fit_window.hi) << '\n';
    f << "tail_count: " << est.tail_count << '\n';
    f << "n_samples: " << est.n_samples << '\n';
    f << "degenerate: " << (est.degenerate ? "true" : "false") << '\n';
    if (!est.warning.empty()) f << "warning: " << est.warning << '\n';
  }
  ctx.out << "wrote " << (ctx.dir / "tail.csv").string() << " and tail_summary.txt\n";
  ctx.out << "beta2 " << format_shortest(pp.beta2()) << ", fitted tail exponent " << format_shortest(est.fitted_exponent)
          << " +- " << format_shortest(est.std_error) << '\n';
  if (!est.warning.empty()) ctx.out << "warning: " << est.warning << '\n';

  PlotSpec spec;
  spec.title = "return-time survival";
  spec.x_label = "t";
  spec.y_label = "P(r > t)";
  spec.log_x = spec.log_y = true;
  spec.series.push_back({"empirical", "#d62728", est.thresholds, est.survival, true});
  if (std::isfinite(est.fitted_exponent)) {
    PlotSeries line{"power-law fit", "#1f77b4", {}, {}, false};
    std::size_t anchor = 0;
    for (std::size_t j = 0; j < est.thresholds.size(); ++j) {
      if (est.thresholds[j] >= est.fit_window.lo && est.survival[j] > 0.0) {
        anchor = j;
        break;
      }
    }
    for (double t : est.thresholds) {
      line.xs.push_back(t);
      line.ys.push_back(est.survival[anchor] * std::pow(t / est.thresholds[anchor], -est.fitted_exponent));
    }
    spec.series.push_back(std::move(line));
  }
  write_figure(ctx, "tail.svg", std::move(spec));
  return kExitOk;
}

int cmd_correlations(const Context& ctx, const ExperimentConfig& cfg) {
  const PoincareParams pp = cfg.poincare_params(cfg.correlations.zeta);
  CorrelationOptions co;
  co.t_grid = {0.0};
  for (double t : log_space(cfg.correlations.dt, cfg.correlations.t_max, cfg.correlations.n_times - 1)) {
    co.t_grid.push_back(t);
  }
  co.n_samples = cfg.correlations.n_samples;
  co.dt = cfg.correlations.dt;
  co.burn_in = cfg.correlations.burn_in;
  co.chunks = cfg.correlations.chunks;
  co.seed = cfg.run.seed;
  co.workers = cfg.run.workers;
  const CorrelationSeries series = correlation_decay(pp, cfg.correlations.v, cfg.correlations.w, co);

  std::optional<PowerLawFit> env;
  std::string env_note;
  try {
    env = envelope_slope(series.times, series.rho, cfg.correlations.window);
  } catch (const FitFailure& e) {
    env_note = e.what();
  }
  double max_rho = 0.0;
  for (std::size_t j = 0; j < series.times.size(); ++j) {
    if (series.times[j] > 0.0) max_rho = std::max(max_rho, series.rho[j]);
  }
  const double noise = 3.0 / std::sqrt(static_cast<double>(series.n_samples));

  Metadata meta = base_metadata("correlations", cfg);
  meta.emplace_back("result.v", series.v_label);
  meta.emplace_back("result.w", series.w_label);
  meta.emplace_back("result.n_samples", std::to_string(series.n_samples));
  meta.emplace_back("result.fit_window", format_shortest(cfg.correlations.window.lo) + "," +
                                              format_shortest(cfg.correlations.window.hi));
  meta.emplace_back("result.envelope_slope", env ? format_double(env->exponent) : "nan");
  {
    auto f = open_output(ctx, "corr.csv");
    write_correlation_csv(f, series, meta);
  }
  {
    auto f = open_output(ctx, "corr_summary.txt");
    f << "beta2: " << format_double(pp.beta2()) << '\n';
    f << "v: " << series.v_label << '\n';
    f << "w: " << series.w_label << '\n';
    f << "n_samples: " << series.n_samples << '\n';
    f << "envelope_slope: " << (env ? format_double(env->exponent) : "nan") << '\n';
    f << "envelope_stderr: " << (env ? format_double(env->std_error) : "nan") << '\n';
    f << "slope_bound: " << format_double(-pp.beta2() + 0.4) << '\n';
    f << "max_rho_positive_t: " << format_double(max_rho) << '\n';
    f << "noise_level: " << format_double(noise) << '\n';
    if (!env_note.empty()) f << "note: " << env_note << '\n';
  }
  ctx.out << "wrote " << (ctx.dir / "corr.csv").string() << " and corr_summary.txt\n";
  if (env) {
    ctx.out << "envelope slope " << format_shortest(env->exponent) << " +- " << format_shortest(env->std_error)
            << " (bound " << format_shortest(-pp.beta2() + 0.4) << ")\n";
  } else {
    ctx.out << "envelope slope unavailable: " << env_note << '\n';
  }
  ctx.out << "max rho for t > 0: " << format_shortest(max_rho) << ", 3/sqrt(n) = " << format_shortest(noise) << '\n';

  PlotSpec spec;
  spec.title = "correlation decay";
  spec.x_label = "t";
  spec.y_label = "rho(t)";
  spec.log_x = spec.log_y = true;
  std::vector<double> ts, rs;
  for (std::size_t j = 0; j < series.times.size(); ++j) {
    if (series.times[j] > 0.0) {
      ts.push_back(series.times[j]);
      rs.push_back(series.rho[j]);
    }
  }
  spec.series.push_back({"rho", "#d62728", ts, rs, true});
  spec.series.push_back({"upper envelope", "#2ca02c", ts, upper_envelope(rs), false});
  write_figure(ctx, "corr.svg", std::move(spec));
  return kExitOk;
}

int cmd_presets(const CommandOptions& opts, std::ostream& out) {
  if (opts.preset) {
    find_preset(*opts.preset).doc.write(out);
    return kExitOk;
  }
  for (const auto& p : presets()) out << p.name << "  " << p.description << '\n';
  return kExitOk;
}

int dispatch(const std::string& name, const CommandOptions& opts, std::ostream& out) {
  if (name == "presets") return cmd_presets(opts, out);

  std::vector<DulacSample> samples;
  IniDocument doc;
  const bool fit_cmd = name == "beta-fit" || name == "beta2-fit";
  if (fit_cmd && opts.sweep_path) {
    std::ifstream in(*opts.sweep_path);
    if (!in) throw ConfigError("cannot open sweep file " + *opts.sweep_path, 0);
    Metadata meta;
    samples = read_sweep_csv(in, &meta);
    if (samples.empty()) throw ConfigError("sweep file " + *opts.sweep_path + " has no rows", 0);
    doc = IniDocument::from_metadata(meta);
    if (opts.preset || opts.config_path) doc.merge(load_document(opts));
  } else {
    doc = load_document(opts);
  }
  ExperimentConfig cfg = resolve(opts, doc);
  if (name == "beta2-fit" && !cfg.sweep_points_set) cfg.sweep.n_points = cfg.fit.beta2_points;
  const Context ctx{opts, out, prepare_dir(cfg)};

  if (name == "dulac-sweep") return cmd_dulac_sweep(ctx, cfg);
  if (name == "beta-fit") return cmd_fit(ctx, cfg, ExponentKind::Beta, std::move(samples));
  if (name == "beta2-fit") return cmd_fit(ctx, cfg, ExponentKind::Beta2, std::move(samples));
  if (name == "orbit") return cmd_orbit(ctx, cfg);
  if (name == "tails") return cmd_tails(ctx, cfg);
  if (name == "correlations") return cmd_correlations(ctx, cfg);
  throw ConfigError("unknown command '" + name + "'", 0);
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"dulac-sweep", "beta-fit",     "beta2-fit", "orbit",
                                              "tails",       "correlations", "presets"};
  return names;
}

IniDocument load_document(const CommandOptions& opts) {
  if (!opts.preset && !opts.config_path) throw ConfigError("no configuration: pass --config PATH or --preset NAME", 0);
  IniDocument doc;
  if (opts.preset) doc = find_preset(*opts.preset).doc;
  if (opts.config_path) {
    std::ifstream in(*opts.config_path);
    if (!in) throw ConfigError("cannot open config file " + *opts.config_path, 0);
    try {
      doc.merge(IniDocument::parse(in));
    } catch (const ConfigError& e) {
      throw ConfigError(*opts.config_path + ": " + e.what(), 0);
    }
  }
  return doc;
}

int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(name, opts, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractViolation& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace nlab::cli
