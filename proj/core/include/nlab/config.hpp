#pragma once

// INI-style configuration text: `[section]` headers, `key = value` lines, `#` or `;` comments.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlab/csv.hpp"
#include "nlab/fields.hpp"
#include "nlab/ode.hpp"

namespace nlab {

class IniDocument {
 public:
  /// Throws ConfigError with the offending line number.
  static IniDocument parse(std::istream& is);
  static IniDocument parse_string(const std::string& text);
  /// Rebuilds a document from `section.key` metadata entries (other entries are ignored).
  static IniDocument from_metadata(const Metadata& meta, const std::string& prefix = "config.");

  bool empty() const { return sections_.empty(); }
  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  /// Line on which the key was defined, 0 if it was set programmatically or is absent.
  int line_of(const std::string& section, const std::string& key) const;

  /// Typed accessors throw ConfigError anchored at the key's line.
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  double require_double(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                      const std::vector<double>& fallback) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  void set_double(const std::string& section, const std::string& key, double value);
  /// Values from `other` override this document's.
  void merge(const IniDocument& other);

  void write(std::ostream& os) const;
  /// One `prefix + section.key` entry per value, in section order.
  Metadata to_metadata(const std::string& prefix = "config.") const;
  std::vector<std::string> sections() const;

  friend bool operator==(const IniDocument& a, const IniDocument& b);

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

/// Reads section `[model]`: name, a0..b2, a1, b1, c0, c2, ell, kappa, and optional dx/dy/dz
/// perturbation lists written as `coeff:px:py:pz, ...`.
NeutralParams params_from_ini(const IniDocument& doc, const std::string& section = "model");
void params_to_ini(const NeutralParams& p, IniDocument& doc, const std::string& section = "model");

/// Reads section `[integrator]`; missing keys keep their defaults.
IntegratorConfig integrator_from_ini(const IniDocument& doc, const std::string& section = "integrator");
void integrator_to_ini(const IntegratorConfig& cfg, IniDocument& doc, const std::string& section = "integrator");

}  // namespace nlab
