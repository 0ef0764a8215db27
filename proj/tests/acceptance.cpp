#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlab/dulac.hpp"
#include "nlab/errors.hpp"
#include "nlab/exponents.hpp"
#include "nlab/fields.hpp"
#include "nlab/ode.hpp"
#include "nlab/poincare.hpp"
#include "nlab/statistics.hpp"
#include "nlab_cli/commands.hpp"
#include "nlab_cli/experiment.hpp"
#include "nlab_cli/presets.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace nlab;
using namespace nlab::cli;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int run_criterion(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += "; over time budget of " + fmt("%.0f", budget_s) + " s";
  }
  std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << title << "  [" << o.detail
            << "; " << fmt("%.2f", secs) << " s]" << std::endl;
  return o.pass ? 0 : 1;
}

NeutralParams coefficients(Model m, double a2, double b2) {
  Coefficients c;
  c.a0 = 15;
  c.a2 = a2;
  c.b0 = 1;
  c.b2 = b2;
  c.a1 = c.b1 = 1;
  c.c0 = c.c2 = 1;
  c.ell = 10;
  return NeutralParams(m, c);
}

struct ExponentCheck {
  bool beta_ok = true;
  bool beta2_ok = true;
  std::string beta_detail;
  std::string beta2_detail;
};

// Criteria 2-4 share the sweep and its two fits.
ExponentCheck check_exponents(Model m, double a2, double b2) {
  const NeutralParams p = coefficients(m, a2, b2);
  const auto e = derived_exponents(p);
  const auto samples = sweep(p, make_grid(1e-5, 1e-4, 250));
  const auto fb = fit_adjustment(samples, e.beta);
  const auto f2 = estimate_beta2(samples, e.beta2);
  ExponentCheck c;
  c.beta_ok = fb.n_valid == samples.size() && std::abs(fb.slope_fit - e.beta) <= 0.01 &&
              fb.err_at_smallest_x < fb.err_at_largest_x;
  c.beta2_ok = f2.n_valid == samples.size() && std::abs(f2.slope_fit - e.beta2) <= 0.03 &&
               f2.err_at_smallest_x < f2.err_at_largest_x;
  const std::string tag(to_string(m));
  c.beta_detail = tag + " beta " + fmt("%.5f", fb.slope_fit) + " vs " + fmt("%.4f", e.beta) + ", adjusted err " +
                  fmt("%.1e", fb.err_at_smallest_x) + " < " + fmt("%.1e", fb.err_at_largest_x);
  c.beta2_detail = tag + " beta2 " + fmt("%.4f", f2.slope_fit) + " vs " + fmt("%.4f", e.beta2) +
                   ", adjusted err " + fmt("%.1e", f2.err_at_smallest_x) + " < " + fmt("%.1e", f2.err_at_largest_x);
  return c;
}

enum class Which { Beta, Beta2, Both };

Outcome combine(const std::vector<ExponentCheck>& checks, Which which) {
  Outcome o{true, ""};
  auto add = [&](bool ok, const std::string& d) {
    o.pass = o.pass && ok;
    o.detail += (o.detail.empty() ? "" : " | ") + d;
  };
  for (const auto& c : checks) {
    if (which != Which::Beta2) add(c.beta_ok, c.beta_detail);
    if (which != Which::Beta) add(c.beta2_ok, c.beta2_detail);
  }
  return o;
}

const std::vector<ExponentCheck>& planar_checks() {
  static const std::vector<ExponentCheck> checks{check_exponents(Model::TwoD, 5, 3),
                                                 check_exponents(Model::TwoD, 6, 2)};
  return checks;
}

Outcome criterion1() {
  const auto sys = linear_system(LinearLorenzParams(1.0, 0.5, 2.0));
  SectionSpec sec;
  sec.g = [](const Vec& s) { return s[0] - 1.0; };
  sec.direction = CrossingDirection::Increasing;
  double worst = 0.0;
  for (double x0 : {1e-3, 1e-4, 1e-5}) {
    const double t = integrate_to_section(sys, make_state(x0, 0.0, 1.0), sec).hit.t_hit;
    worst = std::max(worst, std::abs(t + std::log(x0)) / -std::log(x0));
  }
  return {worst < 1e-8, "max rel err " + fmt("%.2e", worst)};
}

Outcome criterion4() {
  std::vector<ExponentCheck> checks;
  for (Model m : {Model::Model1, Model::Model2, Model::Model3}) {
    checks.push_back(check_exponents(m, 5, 3));
    checks.push_back(check_exponents(m, 6, 2));
  }
  return combine(checks, Which::Both);
}

Outcome criterion5() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  bool equiv = true, fiber = true, blowup = true;
  double worst_fd = 0.0;
  std::size_t fd_points = 0;
  for (const char* name : {"beta040-2d", "beta0266-2d", "model1-beta040", "model2-beta040"}) {
    const auto cfg = ExperimentConfig::from_ini(find_preset(name).doc);
    std::optional<QFunction> q;
    if (cfg.params.model() == Model::Model2) {
      q = QTable::from_samples(sweep(cfg.params, make_grid(1e-6, 0.5, 24))).function();
    }
    const PoincareParams p = cfg.poincare_params(std::nullopt, q);
    for (int i = 0; i < 1000; ++i) {
      double x = u(rng);
      if (x == 0.0) continue;
      const double y = u(rng), y2 = u(rng);
      try {
        const SigmaPoint a = p_neu(p, {x, y});
        const SigmaPoint b = p_neu(p, {-x, -y});
        equiv = equiv && b.x == -a.x && b.y == -a.y && f_neu(p, -x) == -f_neu(p, x);
        const double l2 = fiber_contraction(p, x);
        const double d = std::abs(p_neu(p, {x, y}).y - p_neu(p, {x, y2}).y);
        fiber = fiber && l2 < 1.0 && std::abs(d - l2 * std::abs(y - y2)) <= 4e-16 * (1.0 + std::abs(l2 * y));
      } catch (const DomainEscape&) {
      }
    }
    blowup = blowup && jacobian_eigenvalues(p, 1e-8).lambda1 > 1e3 * jacobian_eigenvalues(p, 1e-2).lambda1;

    // Closed-form dg/dx against a central difference of g = y lambda2(x) - 1/2, step 1e-6 |x|.
    for (int i = 0; i < 25; ++i) {
      const double x = u(rng), y = u(rng);
      if (std::abs(x) < 1e-3) continue;
      const double h = 1e-6 * std::abs(x);
      const double fd = (y * fiber_contraction(p, x + h) - y * fiber_contraction(p, x - h)) / (2 * h);
      const double exact = dg_dx(p, x, y);
      const double rel = exact == 0.0 && fd == 0.0 ? 0.0 : std::abs(fd - exact) / std::abs(exact);
      worst_fd = std::max(worst_fd, rel);
      ++fd_points;
    }
  }
  const bool fd_ok = worst_fd <= 1e-6 && fd_points >= 90;
  return {equiv && fiber && blowup && fd_ok,
          std::string("equivariance ") + (equiv ? "exact" : "broken") + ", fiber factor " +
              (fiber ? "exact" : "off") + ", lambda1 blow-up " + (blowup ? "ok" : "missing") + ", dg/dx fd rel err " +
              fmt("%.1e", worst_fd) + " over " + std::to_string(fd_points) + " points"};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nlab_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

CsvTable run_and_read(const std::string& cmd, const std::string& preset, const fs::path& dir,
                      const std::string& overlay, const std::string& file) {
  CommandOptions o;
  o.preset = preset;
  o.out_dir = (dir / "out").string();
  o.svg = false;
  if (!overlay.empty()) {
    std::ofstream(dir / "overlay.ini") << overlay;
    o.config_path = (dir / "overlay.ini").string();
  }
  std::ostringstream out, err;
  const int code = run_command(cmd, o, out, err);
  if (code != kExitOk) throw std::runtime_error(cmd + " " + preset + " exited " + std::to_string(code) + ": " + err.str());
  std::ifstream in(dir / "out" / file);
  return read_csv(in);
}

double meta_double(const CsvTable& t, const std::string& key) {
  for (const auto& [k, v] : t.metadata) {
    double d = 0;
    if (k == key && parse_double(v, d)) return d;
  }
  return std::nan("");
}

std::vector<double> column(const CsvTable& t, const std::string& name) {
  std::vector<double> out;
  const int c = t.column(name);
  for (const auto& row : t.rows) {
    double d = std::nan("");
    parse_double(row[c], d);
    out.push_back(d);
  }
  return out;
}

Outcome criterion6() {
  const fs::path dir = scratch("tails");
  Outcome o{true, ""};
  for (const auto& [preset, tol] : {std::pair<std::string, double>{"beta2-133-2d", 0.15}, {"beta2-200-2d", 0.20}}) {
    const auto cfg = ExperimentConfig::from_ini(find_preset(preset).doc);
    const double b2 = derived_exponents(cfg.params).beta2;
    const auto table = run_and_read("tails", preset, dir, "", "tail.csv");
    const double n = meta_double(table, "result.n_samples");
    const double expo = meta_double(table, "result.fitted_exponent");
    const bool within = n >= 1e7 && std::abs(expo - b2) <= tol * b2;

    // The survival function over the fit window should be a constant multiple of the
    // Lebesgue pushforward through the roof (flat invariant density near the cusp).
    const auto ts = column(table, "t"), ss = column(table, "survival");
    const double zeta = cfg.tails.zeta.value_or(cfg.poincare.zeta);
    std::vector<double> lx, lr;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (ts[i] < cfg.tails.window.lo || ts[i] > cfg.tails.window.hi || !(ss[i] > 0)) continue;
      lx.push_back(std::log(ts[i]));
      lr.push_back(std::log(ss[i] / oracle::lebesgue_roof_tail(zeta, b2, cfg.poincare.tau2, ts[i])));
    }
    const double drift = oracle::naive_slope(lx.data(), lr.data(), lx.size());
    const bool oracle_ok = std::abs(drift) <= tol * b2;
    o.pass = o.pass && within && oracle_ok;
    o.detail += (o.detail.empty() ? "" : " | ") + preset + " exponent " + fmt("%.4f", expo) + " vs " +
                fmt("%.4f", b2) + " (n " + fmt("%.0e", n) + "), log-slope vs Lebesgue oracle " + fmt("%+.3f", drift);
  }
  fs::remove_all(dir);
  return o;
}

Outcome criterion7() {
  const fs::path dir = scratch("corr");
  const std::string preset = "beta2-133-2d";
  const auto cfg = ExperimentConfig::from_ini(find_preset(preset).doc);
  const double b2 = derived_exponents(cfg.params).beta2;
  const auto odd = run_and_read("correlations", preset, dir, "", "corr.csv");
  const double n = meta_double(odd, "config.correlations.n_samples");
  const auto fit = envelope_slope(column(odd, "t"), column(odd, "rho"), {10.0, 1e3});
  const bool slope_ok = n >= 1e6 && fit.exponent <= -b2 + 0.4;

  const auto flat = run_and_read("correlations", preset, dir, "[correlations]\nw = constant\n", "corr.csv");
  double worst = 0.0;
  for (double r : column(flat, "rho")) worst = std::max(worst, r);
  const double bound = 3.0 / std::sqrt(meta_double(flat, "config.correlations.n_samples"));
  fs::remove_all(dir);
  return {slope_ok && worst <= bound, "envelope slope " + fmt("%.3f", fit.exponent) + " +- " +
                                          fmt("%.3f", fit.std_error) + " (bound " + fmt("%.3f", -b2 + 0.4) +
                                          "), constant w max rho " + fmt("%.1e", worst) + " <= " +
                                          fmt("%.1e", bound)};
}

Outcome criterion8() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uc(0.1, 10.0), ub(0.05, 0.95), uk(0.01, 100.0);
  const auto x = make_grid(1e-5, 1e-1, 40);
  double worst = 0.0, worst_scale = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double c = uc(rng), b = ub(rng), k = uk(rng);
    std::vector<double> w, wk;
    for (double v : x) {
      w.push_back(c * std::pow(v, b));
      wk.push_back(k * c * std::pow(v, b));
    }
    for (auto m : {AdjustmentMethod::FixedExponent, AdjustmentMethod::FreeIntercept}) {
      const auto f = fit_adjustment(x, w, b, m);
      worst = std::max({worst, std::abs(f.c_fit / c - 1), std::abs(f.slope_fit / b - 1)});
      const auto fk = fit_adjustment(x, wk, b, m);
      worst_scale = std::max({worst_scale, std::abs(fk.c_fit / (k * f.c_fit) - 1), std::abs(fk.slope_fit - f.slope_fit)});
    }
    const auto pl = fit_power_law(x, w, {1e-5, 1e-1});
    worst = std::max({worst, std::abs(pl.exponent / b - 1), std::abs(std::exp(pl.intercept) / c - 1)});
  }
  return {worst < 5e-12 && worst_scale < 1e-13,
          "worst relative error " + fmt("%.1e", worst) + ", scale covariance deviation " + fmt("%.1e", worst_scale)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion9() {
  const fs::path dir = scratch("determinism");
  const std::vector<std::string> commands{"dulac-sweep", "beta-fit", "beta2-fit", "orbit", "tails", "correlations"};
  std::size_t files = 0, mismatches = 0;
  std::string first_bad;
  for (const auto& preset : presets()) {
    for (const auto& cmd : commands) {
      for (int pass = 0; pass < 2; ++pass) {
        CommandOptions o;
        o.preset = preset.name;
        o.out_dir = (dir / std::to_string(pass)).string();
        o.svg = false;
        o.workers = pass == 0 ? 1u : 2u;
        std::ostringstream out, err;
        const int code = run_command(cmd, o, out, err);
        if (code != kExitOk) throw std::runtime_error(cmd + " " + preset.name + ": " + err.str());
      }
      for (const auto& entry : fs::directory_iterator(dir / "0")) {
        if (entry.path().extension() != ".csv") continue;
        ++files;
        if (slurp(entry.path()) != slurp(dir / "1" / entry.path().filename())) {
          ++mismatches;
          if (first_bad.empty()) first_bad = preset.name + "/" + cmd + "/" + entry.path().filename().string();
        }
      }
      fs::remove_all(dir / "0");
      fs::remove_all(dir / "1");
    }
  }
  fs::remove_all(dir);
  return {mismatches == 0 && files > 0, std::to_string(files) + " CSV files compared across " +
                                            std::to_string(presets().size()) + " presets, " +
                                            std::to_string(mismatches) + " differ" +
                                            (first_bad.empty() ? "" : " (first: " + first_bad + ")")};
}

}  // namespace

int main() {
  int failed = 0;
  failed += run_criterion(1, "linear exit time oracle", 1.0, criterion1);
  failed += run_criterion(2, "2-D beta recovery (250 points)", 300.0,
                          [] { return combine(planar_checks(), Which::Beta); });
  failed += run_criterion(3, "2-D beta2 recovery (250 points)", 300.0,
                          [] { return combine(planar_checks(), Which::Beta2); });
  failed += run_criterion(4, "models 1-3 exponent equivalence", 1800.0, criterion4);
  failed += run_criterion(5, "Poincare map property suite", 60.0, criterion5);
  failed += run_criterion(6, "return-time tail exponent", 600.0, criterion6);
  failed += run_criterion(7, "correlation decay envelope", 1800.0, criterion7);
  failed += run_criterion(8, "synthetic regression exactness", 10.0, criterion8);
  failed += run_criterion(9, "preset determinism (byte-identical CSVs)", 1800.0, criterion9);
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
