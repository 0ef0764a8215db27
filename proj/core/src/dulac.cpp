#include "nlab/dulac.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "nlab/errors.hpp"
#include "nlab/parallel.hpp"

namespace nlab {

std::string_view to_string(SampleStatus s) {
  switch (s) {
    case SampleStatus::Ok: return "ok";
    case SampleStatus::NoCrossing: return "no_crossing";
    case SampleStatus::StiffnessFailure: return "stiffness_failure";
    case SampleStatus::BudgetExceeded: return "budget_exceeded";
    case SampleStatus::Failed: return "failed";
  }
  return "failed";
}

SampleStatus sample_status_from_string(std::string_view s) {
  if (s == "ok") return SampleStatus::Ok;
  if (s == "no_crossing") return SampleStatus::NoCrossing;
  if (s == "stiffness_failure") return SampleStatus::StiffnessFailure;
  if (s == "budget_exceeded") return SampleStatus::BudgetExceeded;
  return SampleStatus::Failed;
}

namespace {

bool uses_quadrature(const NeutralParams& p) {
  return p.model() != Model::TwoD && (p.coeffs().c0 > 0.0 || p.coeffs().c2 > 0.0);
}

std::string at_x0(double x0) { return " [x0 = " + format_double(x0) + "]"; }

}  // namespace

DulacSample dulac_map(const NeutralParams& p, double x0, const LeafAnchors& anchors, const DulacOptions& opts) {
  if (!(std::abs(x0) > 0.0) || !(std::abs(x0) <= 1.0)) {
    throw ContractViolation("Dulac start must satisfy 0 < |x0| <= 1" + at_x0(x0));
  }
  const bool planar = p.model() == Model::TwoD;
  const bool quad = uses_quadrature(p);

  DulacSample sample;
  sample.x0 = x0;
  sample.y0 = anchors.y0;
  if (!planar) sample.z0 = anchors.z0;

  Vec s0 = planar ? make_state(x0, anchors.y0) : make_state(x0, anchors.y0, anchors.z0);
  if (quad) {
    Vec aug(4);
    aug << s0[0], s0[1], s0[2], 0.0;
    s0 = aug;
  }

  const double target = x0 > 0.0 ? 1.0 : -1.0;
  if (std::abs(x0) == 1.0) {
    sample.exit.t_hit = 0.0;
    sample.exit.s_hit = s0;
    sample.exit.residual = 0.0;
    sample.omega = planar ? anchors.y0 : anchors.z0;
    sample.tau = 0.0;
    return sample;
  }

  IntegratorConfig cfg = opts.integrator;
  if (opts.zeta_hat) {
    const double beta2 = derived_exponents(p).beta2;
    const double predicted = *opts.zeta_hat * std::pow(std::abs(x0), -1.0 / beta2);
    cfg.max_time = std::max(opts.budget_floor, opts.budget_factor * predicted);
  }

  SectionSpec sec;
  sec.g = [target](const Vec& s) { return s[0] - target; };
  sec.direction = target > 0 ? CrossingDirection::Increasing : CrossingDirection::Decreasing;

  const OdeSystem sys = neutral_system(p, quad);
  SectionResult res;
  try {
    res = integrate_to_section(sys, s0, sec, cfg);
  } catch (const NoCrossing& e) {
    throw NoCrossing(e.what() + at_x0(x0));
  } catch (const StiffnessFailure& e) {
    throw StiffnessFailure(e.what() + at_x0(x0));
  } catch (const BudgetExceeded& e) {
    throw BudgetExceeded(e.what() + at_x0(x0));
  }

  sample.exit = res.hit;
  sample.tau = res.hit.t_hit;
  sample.omega = planar ? res.hit.s_hit[1] : res.hit.s_hit[2];
  if (quad) sample.q = res.hit.s_hit[3];
  return sample;
}

AsymptoticPrediction predict(const NeutralParams& p, double x0, const DulacConstants& constants) {
  if (!(constants.c > 0.0) || !(constants.c_t > 0.0)) {
    throw ContractViolation("asymptotic constants must be positive");
  }
  const auto e = derived_exponents(p);
  AsymptoticPrediction out;
  out.constants = constants;
  out.omega_pred = constants.c * std::pow(std::abs(x0), e.beta);
  out.tau_pred = constants.c_t * std::pow(std::abs(x0), -1.0 / e.beta2);
  return out;
}

std::vector<double> make_grid(double x_min, double x_max, std::size_t n, Spacing spacing) {
  if (n == 0) throw ContractViolation("grid needs at least one point");
  if (!(x_min > 0.0) || !(x_max <= 1.0) || !(x_min <= x_max)) {
    throw ContractViolation("grid bounds must satisfy 0 < x_min <= x_max <= 1");
  }
  if (n > 1 && !(x_min < x_max)) throw ContractViolation("grid with several points needs x_min < x_max");
  std::vector<double> grid(n);
  if (n == 1) {
    grid[0] = x_max;
    return grid;
  }
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / denom;
    if (spacing == Spacing::Log) {
      grid[i] = std::exp(std::log(x_max) + u * (std::log(x_min) - std::log(x_max)));
    } else {
      grid[i] = x_max + u * (x_min - x_max);
    }
  }
  grid.front() = x_max;
  grid.back() = x_min;
  return grid;
}

std::vector<DulacSample> sweep(const NeutralParams& p, const std::vector<double>& x_grid,
                               const LeafAnchors& anchors, const DulacOptions& opts, unsigned workers) {
  if (x_grid.empty()) throw ContractViolation("sweep grid is empty");
  for (double x : x_grid) {
    if (!(std::abs(x) > 0.0) || !(std::abs(x) <= 1.0)) {
      throw ContractViolation("sweep grid point outside 0 < |x| <= 1" + at_x0(x));
    }
  }
  opts.integrator.validate();

  std::vector<DulacSample> out(x_grid.size());
  parallel_for(x_grid.size(), workers, [&](std::size_t i) {
    const double x0 = x_grid[i];
    auto failed = [&](SampleStatus status, const char* what) {
      DulacSample s;
      s.x0 = x0;
      s.y0 = anchors.y0;
      if (p.model() != Model::TwoD) s.z0 = anchors.z0;
      s.omega = std::nan("");
      s.tau = std::nan("");
      s.status = status;
      s.message = what;
      out[i] = std::move(s);
    };
    try {
      out[i] = dulac_map(p, x0, anchors, opts);
    } catch (const NoCrossing& e) {
      failed(SampleStatus::NoCrossing, e.what());
    } catch (const StiffnessFailure& e) {
      failed(SampleStatus::StiffnessFailure, e.what());
    } catch (const BudgetExceeded& e) {
      failed(SampleStatus::BudgetExceeded, e.what());
    } catch (const Error& e) {
      failed(SampleStatus::Failed, e.what());
    }
  });

  std::size_t ok = 0;
  for (const auto& s : out) ok += s.ok() ? 1 : 0;
  if (ok == 0) {
    throw SweepFailure("all " + std::to_string(out.size()) + " sweep points failed; first: " + out.front().message);
  }
  return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<DulacSample>& samples, const Metadata& meta) {
  write_metadata(os, meta);
  os << "x0,omega,tau,status\n";
  for (const auto& s : samples) {
    os << format_double(s.x0) << ',' << format_double(s.omega) << ',' << format_double(s.tau) << ','
       << to_string(s.status) << '\n';
  }
}

std::vector<DulacSample> read_sweep_csv(std::istream& is, Metadata* meta) {
  const CsvTable table = read_csv(is);
  const int cx = table.column("x0"), co = table.column("omega"), ct = table.column("tau"),
            cs = table.column("status");
  if (cx < 0 || co < 0 || ct < 0) throw ConfigError("sweep CSV needs columns x0,omega,tau", 0);
  std::vector<DulacSample> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    DulacSample s;
    const auto need = static_cast<std::size_t>(std::max({cx, co, ct, cs}) + 1);
    if (row.size() < need || !parse_double(row[cx], s.x0) || !parse_double(row[co], s.omega) ||
        !parse_double(row[ct], s.tau)) {
      throw ConfigError("malformed sweep CSV row " + std::to_string(r + 1), 0);
    }
    s.status = cs >= 0 ? sample_status_from_string(row[cs]) : SampleStatus::Ok;
    out.push_back(std::move(s));
  }
  if (meta) *meta = table.metadata;
  return out;
}

}  // namespace nlab
