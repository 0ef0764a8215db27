#include "nlab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "nlab/errors.hpp"
#include "nlab/parallel.hpp"
#include "nlab/regression.hpp"
#include "nlab/rng.hpp"

namespace nlab {

PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys, const FitWindow& window) {
  if (xs.size() != ys.size()) throw FitFailure("power-law fit inputs differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] >= window.lo && xs[i] <= window.hi)) continue;
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw FitFailure("nonpositive value at x = " + format_double(xs[i]) + " inside the fit window");
    }
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  if (lx.size() < 3) {
    throw FitFailure("power-law fit needs at least 3 points in the window, got " + std::to_string(lx.size()));
  }
  const LinearFit reg = ols(lx, ly);
  PowerLawFit out;
  out.exponent = reg.slope;
  out.intercept = reg.intercept;
  out.std_error = reg.slope_stderr;
  out.residual_stderr = reg.residual_stderr;
  out.n_points = reg.n;
  return out;
}

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo) || n == 0) throw ContractViolation("log_space needs 0 < lo <= hi and n >= 1");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

namespace {

double draw_start(Rng& rng) {
  double x = 0.0;
  while (x == 0.0) x = rng.uniform(-1.0, 1.0);
  return x;
}

double step_map(const PoincareParams& p, double x, Rng& rng) {
  double fx = f_neu_checked(p, x);
  while (fx == 0.0) fx = rng.uniform(-1e-12, 1e-12);
  return fx;
}

double roof_at(const PoincareParams& p, const ScalarFn& roof, double x) { return roof ? roof(x) : r_neu(p, x); }

}  // namespace

TailEstimate return_time_tail(const PoincareParams& p, const TailOptions& opts) {
  if (opts.n_iterates == 0 || opts.chunks == 0) throw ContractViolation("tail estimate needs iterates and chunks");
  if (opts.thresholds.empty() || !std::is_sorted(opts.thresholds.begin(), opts.thresholds.end())) {
    throw ContractViolation("thresholds must be a nonempty increasing list");
  }
  if (!(opts.window.lo < opts.window.hi)) throw ContractViolation("fit window needs lo < hi");
  const auto& th = opts.thresholds;
  const std::size_t n_th = th.size();
  const std::size_t chunks = std::min(opts.chunks, opts.n_iterates);

  // hist[k] counts samples with exactly k thresholds strictly below r.
  std::vector<std::vector<std::size_t>> hist(chunks, std::vector<std::size_t>(n_th + 1, 0));
  parallel_for(chunks, opts.workers, [&](std::size_t c) {
    Rng rng(stream_seed(opts.seed, c));
    const std::size_t len = opts.n_iterates / chunks + (c < opts.n_iterates % chunks ? 1 : 0);
    double x = draw_start(rng);
    for (std::size_t i = 0; i < opts.burn_in; ++i) x = step_map(p, x, rng);
    auto& h = hist[c];
    for (std::size_t i = 0; i < len; ++i) {
      const double r = roof_at(p, opts.roof, x);
      const auto k = static_cast<std::size_t>(std::lower_bound(th.begin(), th.end(), r) - th.begin());
      ++h[k];
      x = step_map(p, x, rng);
    }
  });

  std::vector<std::size_t> total(n_th + 1, 0);
  for (const auto& h : hist) {
    for (std::size_t k = 0; k <= n_th; ++k) total[k] += h[k];
  }

  TailEstimate est;
  est.thresholds = th;
  est.n_samples = opts.n_iterates;
  est.fit_window = opts.window;
  est.counts.assign(n_th, 0);
  est.survival.assign(n_th, 0.0);
  std::size_t above = 0;
  for (std::size_t j = n_th; j-- > 0;) {
    above += total[j + 1];
    est.counts[j] = above;
    est.survival[j] = static_cast<double>(above) / static_cast<double>(opts.n_iterates);
  }

  std::vector<double> ts, ss;
  std::size_t distinct = 0;
  double last = -1.0;
  est.tail_count = opts.n_iterates;
  for (std::size_t j = 0; j < n_th; ++j) {
    if (th[j] < opts.window.lo || th[j] > opts.window.hi) continue;
    est.tail_count = est.counts[j];
    if (est.survival[j] <= 0.0) continue;
    ts.push_back(th[j]);
    ss.push_back(est.survival[j]);
    if (est.survival[j] != last) ++distinct;
    last = est.survival[j];
  }

  if (ts.size() < 3) {
    throw TailUndersampled("only " + std::to_string(ts.size()) +
                               " thresholds in the fit window have a nonempty tail; increase n_iterates",
                           est.tail_count);
  }
  if (est.tail_count < opts.min_tail_count) {
    const std::string msg = "only " + std::to_string(est.tail_count) + " samples exceed t = " +
                            format_double(opts.window.hi) + " (want " + std::to_string(opts.min_tail_count) +
                            "); widen the window or increase n_iterates";
    if (opts.policy == UndersamplingPolicy::Throw) throw TailUndersampled(msg, est.tail_count);
    est.warning = msg;
  }
  if (distinct < 3) {
    est.degenerate = true;
    est.warning += est.warning.empty() ? "" : "; ";
    est.warning += "survival function is not a power law in the window";
    est.fitted_exponent = std::nan("");
    est.std_error = std::nan("");
    return est;
  }
  const PowerLawFit fit = fit_power_law(ts, ss, opts.window);
  est.fitted_exponent = -fit.exponent;
  est.std_error = fit.std_error;
  return est;
}

double ObservableSpec::operator()(double x, double s, double r) const {
  if (kind == ObservableKind::Constant) return value;
  const double u = (std::abs(x) - center) / width;
  if (!(std::abs(u) < 1.0)) return 0.0;
  const double bump = (1.0 - u * u) * (1.0 - u * u);
  const double phase = std::sin(std::numbers::pi * s / r);
  const double v = bump * phase * phase;
  return kind == ObservableKind::OddBump ? (x > 0.0 ? v : -v) : v;
}

std::string ObservableSpec::describe() const {
  switch (kind) {
    case ObservableKind::OddBump:
      return "odd_bump(center=" + format_shortest(center) + ",width=" + format_shortest(width) + ")";
    case ObservableKind::EvenBump:
      return "even_bump(center=" + format_shortest(center) + ",width=" + format_shortest(width) + ")";
    case ObservableKind::Constant:
      return "constant(" + format_shortest(value) + ")";
  }
  return "";
}

ObservableSpec observable_from_string(const std::string& name) {
  ObservableSpec o;
  if (name == "odd_bump") {
    o.kind = ObservableKind::OddBump;
  } else if (name == "even_bump") {
    o.kind = ObservableKind::EvenBump;
  } else if (name == "constant") {
    o.kind = ObservableKind::Constant;
  } else {
    throw ContractViolation("unknown observable '" + name + "' (odd_bump, even_bump, constant)");
  }
  return o;
}

CorrelationSeries correlation_decay(const PoincareParams& p, const ObservableSpec& v, const ObservableSpec& w,
                                    const CorrelationOptions& opts) {
  if (opts.t_grid.empty()) throw ContractViolation("correlation time grid is empty");
  if (!(opts.dt > 0.0)) throw ContractViolation("dt must be positive");
  if (opts.chunks == 0 || opts.n_samples < opts.chunks) throw ContractViolation("need at least one sample per chunk");

  std::vector<std::size_t> lags;
  for (double t : opts.t_grid) {
    if (!(t >= 0.0)) throw ContractViolation("correlation times must be nonnegative");
    lags.push_back(static_cast<std::size_t>(std::llround(t / opts.dt)));
  }
  std::sort(lags.begin(), lags.end());
  lags.erase(std::unique(lags.begin(), lags.end()), lags.end());
  const std::size_t max_lag = lags.back();
  const std::size_t n_lags = lags.size();
  const std::size_t chunks = opts.chunks;

  struct ChunkSums {
    std::size_t n = 0;
    double sum_v = 0.0;
    std::vector<double> sum_w;   // per lag, over shifted positions
    std::vector<double> sum_vw;  // per lag
  };
  std::vector<ChunkSums> sums(chunks);

  parallel_for(chunks, opts.workers, [&](std::size_t c) {
    Rng rng(stream_seed(opts.seed, c));
    const std::size_t n = opts.n_samples / chunks + (c < opts.n_samples % chunks ? 1 : 0);
    const std::size_t len = n + max_lag;
    std::vector<double> vs(n), ws(len);

    double x = draw_start(rng);
    for (std::size_t i = 0; i < opts.burn_in; ++i) x = step_map(p, x, rng);
    double r = roof_at(p, opts.roof, x);
    double s = rng.uniform() * r;
    for (std::size_t k = 0; k < len; ++k) {
      while (s >= r) {
        s -= r;
        x = step_map(p, x, rng);
        r = roof_at(p, opts.roof, x);
      }
      if (k < n) vs[k] = v(x, s, r);
      ws[k] = w(x, s, r);
      s += opts.dt;
    }

    ChunkSums& cs = sums[c];
    cs.n = n;
    cs.sum_w.assign(n_lags, 0.0);
    cs.sum_vw.assign(n_lags, 0.0);
    for (std::size_t k = 0; k < n; ++k) cs.sum_v += vs[k];
    for (std::size_t j = 0; j < n_lags; ++j) {
      const std::size_t m = lags[j];
      double sw = 0.0, svw = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        sw += ws[k + m];
        svw += vs[k] * ws[k + m];
      }
      cs.sum_w[j] = sw;
      cs.sum_vw[j] = svw;
    }
  });

  CorrelationSeries out;
  out.v_label = v.describe();
  out.w_label = w.describe();
  out.n_samples = opts.n_samples;
  const auto N = static_cast<double>(opts.n_samples);
  double total_v = 0.0;
  for (const auto& cs : sums) total_v += cs.sum_v;
  for (std::size_t j = 0; j < n_lags; ++j) {
    double tw = 0.0, tvw = 0.0;
    for (const auto& cs : sums) {
      tw += cs.sum_w[j];
      tvw += cs.sum_vw[j];
    }
    const double cov = tvw / N - (total_v / N) * (tw / N);

    double acc = 0.0;
    if (chunks > 1) {
      for (const auto& cs : sums) {
        const double nc = static_cast<double>(cs.n);
        const double c_cov = cs.sum_vw[j] / nc - (cs.sum_v / nc) * (cs.sum_w[j] / nc);
        acc += (c_cov - cov) * (c_cov - cov);
      }
      acc = std::sqrt(acc / static_cast<double>(chunks - 1) / static_cast<double>(chunks));
    }
    if (!std::isfinite(cov) || !std::isfinite(acc)) {
      throw SimulationFailure("non-finite correlation estimate at lag " + std::to_string(lags[j]));
    }
    out.times.push_back(static_cast<double>(lags[j]) * opts.dt);
    out.rho.push_back(std::abs(cov));
    out.std_error.push_back(acc);
  }
  return out;
}

std::vector<double> upper_envelope(const std::vector<double>& ys) {
  std::vector<double> env(ys.size());
  double run = -std::numeric_limits<double>::infinity();
  for (std::size_t i = ys.size(); i-- > 0;) {
    run = std::max(run, ys[i]);
    env[i] = run;
  }
  return env;
}

PowerLawFit envelope_slope(const std::vector<double>& times, const std::vector<double>& rho, const FitWindow& window) {
  if (times.size() != rho.size()) throw FitFailure("times and rho differ in length");
  // The envelope is taken over the window only, so noise beyond it does not leak in.
  std::vector<double> ts, rs;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= window.lo && times[i] <= window.hi) {
      ts.push_back(times[i]);
      rs.push_back(rho[i]);
    }
  }
  return fit_power_law(ts, upper_envelope(rs), window);
}

void write_tail_csv(std::ostream& os, const TailEstimate& est, const Metadata& meta) {
  write_metadata(os, meta);
  os << "t,survival\n";
  for (std::size_t j = 0; j < est.thresholds.size(); ++j) {
    os << format_double(est.thresholds[j]) << ',' << format_double(est.survival[j]) << '\n';
  }
}

void write_correlation_csv(std::ostream& os, const CorrelationSeries& series, const Metadata& meta) {
  write_metadata(os, meta);
  os << "t,rho\n";
  for (std::size_t j = 0; j < series.times.size(); ++j) {
    os << format_double(series.times[j]) << ',' << format_double(series.rho[j]) << '\n';
  }
}

}  // namespace nlab
