#include "nlab_cli/presets.hpp"

#include "nlab/errors.hpp"

namespace nlab::cli {

namespace {

struct ExponentSet {
  const char* tag;
  double a0, a2, b0, b2;
  // Map constants keeping f_neu chaotic and inside [-1, 1].
  double a_exp, c_asym;
  // Leading flow-time constant of the Dulac transit at these coefficients.
  double zeta;
  // Tail sample size; the thinner beta2 = 2 tail needs more iterates.
  const char* tail_iterates;
};

constexpr ExponentSet kBeta040{"beta040", 15.0, 5.0, 1.0, 3.0, 1.6, 1.12, 0.133, "10000000"};
constexpr ExponentSet kBeta0266{"beta0266", 15.0, 6.0, 1.0, 2.0, 1.5, 1.07, 0.215, "100000000"};

Preset make(const std::string& name, const std::string& description, const char* model, const ExponentSet& e,
            int n_points) {
  IniDocument doc;
  doc.set("model", "name", model);
  doc.set_double("model", "a0", e.a0);
  doc.set_double("model", "a2", e.a2);
  doc.set_double("model", "b0", e.b0);
  doc.set_double("model", "b2", e.b2);
  doc.set_double("model", "ell", 10.0);
  if (std::string(model) != "2d") {
    if (std::string(model) != "model2") {
      doc.set_double("model", "a1", 1.0);
      doc.set_double("model", "b1", 1.0);
    }
    if (std::string(model) != "model1") {
      doc.set_double("model", "c0", 1.0);
      doc.set_double("model", "c2", 1.0);
    }
  }
  doc.set_double("sweep", "x_min", 1e-5);
  doc.set_double("sweep", "x_max", 1e-4);
  doc.set("sweep", "n_points", std::to_string(n_points));
  doc.set("sweep", "spacing", "log");
  doc.set_double("sweep", "y0", 1.0);
  doc.set_double("sweep", "z0", 1.0);

  doc.set_double("poincare", "a_exp", e.a_exp);
  doc.set_double("poincare", "c_asym", e.c_asym);
  doc.set_double("poincare", "zeta", e.zeta);

  doc.set_double("tails", "zeta", 10.0);
  doc.set("tails", "n_iterates", e.tail_iterates);
  doc.set_double("tails", "fit_lo", 1e2);
  doc.set_double("tails", "fit_hi", 1e4);

  doc.set_double("correlations", "zeta", 10.0);
  doc.set("correlations", "v", "odd_bump");
  doc.set("correlations", "w", "odd_bump");
  doc.set("correlations", "n_samples", "1000000");
  doc.set_double("correlations", "t_max", 1e3);
  doc.set_double("correlations", "fit_lo", 10.0);
  doc.set_double("correlations", "fit_hi", 1e3);

  doc.set("run", "seed", "1");
  return {name, description, std::move(doc)};
}

std::vector<Preset> build() {
  std::vector<Preset> out;
  const struct {
    const char* model;
    const char* label;
  } models[] = {{"model1", "neutral model 1"}, {"model2", "neutral model 2"}, {"model3", "neutral model 3"}};

  out.push_back(make("beta040-2d", "planar field a0=15 a2=5 b0=1 b2=3 (beta 0.40, beta2 4/3), 250 points",
                     "2d", kBeta040, 250));
  out.push_back(make("beta0266-2d", "planar field a0=15 a2=6 b0=1 b2=2 (beta 0.2667, beta2 2), 250 points",
                     "2d", kBeta0266, 250));
  for (const auto& m : models) {
    out.push_back(make(std::string(m.model) + "-beta040",
                       std::string(m.label) + ", a1=b1=1 c0=c2=1 ell=10, beta 0.40, 250 points", m.model, kBeta040,
                       250));
  }
  for (const auto& m : models) {
    out.push_back(make(std::string(m.model) + "-beta0266",
                       std::string(m.label) + ", a1=b1=1 c0=c2=1 ell=10, beta 0.2667, 250 points", m.model,
                       kBeta0266, 250));
  }
  out.push_back(make("beta2-133-2d", "planar field for beta2 = 4/3, 50 points", "2d", kBeta040, 50));
  out.push_back(make("beta2-200-2d", "planar field for beta2 = 2, 50 points", "2d", kBeta0266, 50));
  for (const auto& m : models) {
    out.push_back(make(std::string(m.model) + "-beta2-133", std::string(m.label) + " for beta2 = 4/3, 50 points",
                       m.model, kBeta040, 50));
  }
  for (const auto& m : models) {
    out.push_back(make(std::string(m.model) + "-beta2-200", std::string(m.label) + " for beta2 = 2, 50 points",
                       m.model, kBeta0266, 50));
  }
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown preset '" + name + "' (run `nlab presets` for the list)", 0);
}

}  // namespace nlab::cli
