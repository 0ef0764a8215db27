#include "nlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "nlab/errors.hpp"

namespace nlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

IniDocument IniDocument::parse(std::istream& is) {
  IniDocument doc;
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header '" + line + "'", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_name(section)) throw ConfigError("invalid section name '" + section + "'", line_no);
      doc.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
    if (section.empty()) throw ConfigError("key outside of any [section]", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_name(key)) throw ConfigError("invalid key '" + key + "'", line_no);
    auto& sec = doc.sections_[section];
    if (sec.count(key)) throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line_no);
    sec[key] = Entry{value, line_no};
  }
  return doc;
}

IniDocument IniDocument::parse_string(const std::string& text) {
  std::istringstream is(text);
  return parse(is);
}

IniDocument IniDocument::from_metadata(const Metadata& meta, const std::string& prefix) {
  IniDocument doc;
  for (const auto& [k, v] : meta) {
    if (k.rfind(prefix, 0) != 0) continue;
    const std::string rest = k.substr(prefix.size());
    const auto dot = rest.find('.');
    if (dot == std::string::npos) continue;
    doc.set(rest.substr(0, dot), rest.substr(dot + 1), v);
  }
  return doc;
}

bool IniDocument::has_section(const std::string& section) const { return sections_.count(section) > 0; }

bool IniDocument::has(const std::string& section, const std::string& key) const {
  const auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

std::optional<std::string> IniDocument::get(const std::string& section, const std::string& key) const {
  const auto it = sections_.find(section);
  if (it == sections_.end()) return std::nullopt;
  const auto jt = it->second.find(key);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second.value;
}

int IniDocument::line_of(const std::string& section, const std::string& key) const {
  const auto it = sections_.find(section);
  if (it == sections_.end()) return 0;
  const auto jt = it->second.find(key);
  return jt == it->second.end() ? 0 : jt->second.line;
}

double IniDocument::require_double(const std::string& section, const std::string& key) const {
  const auto v = get(section, key);
  if (!v) throw ConfigError("missing required key '" + key + "' in [" + section + "]", 0);
  double out = 0.0;
  if (!parse_double(*v, out)) {
    throw ConfigError("'" + key + "' expects a number, got '" + *v + "'", line_of(section, key));
  }
  return out;
}

double IniDocument::get_double(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? require_double(section, key) : fallback;
}

long long IniDocument::get_int(const std::string& section, const std::string& key, long long fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  long long out = 0;
  const char* end = v->data() + v->size();
  auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec == std::errc() && ptr == end) return out;
  // Accept integral values written in floating-point notation, e.g. 1e7.
  double d = 0.0;
  if (parse_double(*v, d) && d == std::floor(d) && std::abs(d) < 9.2e18) return static_cast<long long>(d);
  throw ConfigError("'" + key + "' expects an integer, got '" + *v + "'", line_of(section, key));
}

bool IniDocument::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  std::string s = *v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError("'" + key + "' expects true/false, got '" + *v + "'", line_of(section, key));
}

std::string IniDocument::get_string(const std::string& section, const std::string& key,
                                    const std::string& fallback) const {
  return get(section, key).value_or(fallback);
}

std::vector<double> IniDocument::get_double_list(const std::string& section, const std::string& key,
                                                 const std::vector<double>& fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : split(*v, ',')) {
    double d = 0.0;
    if (!parse_double(item, d)) {
      throw ConfigError("'" + key + "' expects a comma-separated list of numbers", line_of(section, key));
    }
    out.push_back(d);
  }
  return out;
}

void IniDocument::set(const std::string& section, const std::string& key, const std::string& value) {
  sections_[section][key] = Entry{value, 0};
}

void IniDocument::set_double(const std::string& section, const std::string& key, double value) {
  set(section, key, format_shortest(value));
}

void IniDocument::merge(const IniDocument& other) {
  for (const auto& [sec, entries] : other.sections_) {
    auto& mine = sections_[sec];
    for (const auto& [k, e] : entries) mine[k] = e;
  }
}

void IniDocument::write(std::ostream& os) const {
  bool first = true;
  for (const auto& [sec, entries] : sections_) {
    if (!first) os << '\n';
    first = false;
    os << '[' << sec << "]\n";
    for (const auto& [k, e] : entries) os << k << " = " << e.value << '\n';
  }
}

Metadata IniDocument::to_metadata(const std::string& prefix) const {
  Metadata meta;
  for (const auto& [sec, entries] : sections_) {
    for (const auto& [k, e] : entries) meta.emplace_back(prefix + sec + "." + k, e.value);
  }
  return meta;
}

std::vector<std::string> IniDocument::sections() const {
  std::vector<std::string> out;
  for (const auto& [sec, entries] : sections_) out.push_back(sec);
  return out;
}

bool operator==(const IniDocument& a, const IniDocument& b) {
  if (a.sections_.size() != b.sections_.size()) return false;
  for (const auto& [sec, entries] : a.sections_) {
    const auto it = b.sections_.find(sec);
    if (it == b.sections_.end() || it->second.size() != entries.size()) return false;
    for (const auto& [k, e] : entries) {
      const auto jt = it->second.find(k);
      if (jt == it->second.end() || jt->second.value != e.value) return false;
    }
  }
  return true;
}

namespace {

std::vector<Monomial> parse_monomials(const IniDocument& doc, const std::string& section, const std::string& key) {
  std::vector<Monomial> out;
  const auto v = doc.get(section, key);
  if (!v || v->empty()) return out;
  for (const auto& item : split(*v, ',')) {
    const auto parts = split(item, ':');
    Monomial m;
    long long px = 0, py = 0, pz = 0;
    auto int_ok = [](const std::string& s, long long& o) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), o);
      return ec == std::errc() && p == s.data() + s.size() && o >= 0 && o < 64;
    };
    if (parts.size() != 4 || !parse_double(parts[0], m.coeff) || !int_ok(parts[1], px) || !int_ok(parts[2], py) ||
        !int_ok(parts[3], pz)) {
      throw ConfigError("'" + key + "' expects terms 'coeff:px:py:pz', got '" + item + "'",
                        doc.line_of(section, key));
    }
    m.px = static_cast<int>(px);
    m.py = static_cast<int>(py);
    m.pz = static_cast<int>(pz);
    out.push_back(m);
  }
  return out;
}

std::string format_monomials(const std::vector<Monomial>& ms) {
  std::string out;
  for (const auto& m : ms) {
    if (!out.empty()) out += ", ";
    out += format_shortest(m.coeff) + ":" + std::to_string(m.px) + ":" + std::to_string(m.py) + ":" +
           std::to_string(m.pz);
  }
  return out;
}

}  // namespace

NeutralParams params_from_ini(const IniDocument& doc, const std::string& section) {
  if (!doc.has_section(section)) throw ConfigError("missing [" + section + "] section", 0);
  const auto name = doc.get(section, "name");
  if (!name) throw ConfigError("missing required key 'name' in [" + section + "]", 0);
  Model model;
  try {
    model = model_from_string(*name);
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what(), doc.line_of(section, "name"));
  }
  Coefficients c;
  c.a0 = doc.get_double(section, "a0", c.a0);
  c.a1 = doc.get_double(section, "a1", c.a1);
  c.a2 = doc.get_double(section, "a2", c.a2);
  c.b0 = doc.get_double(section, "b0", c.b0);
  c.b1 = doc.get_double(section, "b1", c.b1);
  c.b2 = doc.get_double(section, "b2", c.b2);
  c.c0 = doc.get_double(section, "c0", c.c0);
  c.c2 = doc.get_double(section, "c2", c.c2);
  c.ell = doc.get_double(section, "ell", c.ell);
  const double kappa = doc.get_double(section, "kappa", 2.0);

  std::optional<Perturbation> pert;
  Perturbation pt;
  pt.dx = parse_monomials(doc, section, "dx");
  pt.dy = parse_monomials(doc, section, "dy");
  pt.dz = parse_monomials(doc, section, "dz");
  if (!pt.empty()) pert = pt;

  try {
    return NeutralParams(model, c, pert, kappa);
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("invalid [") + section + "] parameters: " + e.what(), 0);
  }
}

void params_to_ini(const NeutralParams& p, IniDocument& doc, const std::string& section) {
  const auto& c = p.coeffs();
  doc.set(section, "name", std::string(to_string(p.model())));
  doc.set_double(section, "a0", c.a0);
  doc.set_double(section, "a2", c.a2);
  doc.set_double(section, "b0", c.b0);
  doc.set_double(section, "b2", c.b2);
  if (p.model() != Model::TwoD) {
    doc.set_double(section, "a1", c.a1);
    doc.set_double(section, "b1", c.b1);
    doc.set_double(section, "c0", c.c0);
    doc.set_double(section, "c2", c.c2);
    doc.set_double(section, "ell", c.ell);
  } else if (c.ell != 0.0) {
    doc.set_double(section, "ell", c.ell);
  }
  if (p.kappa() != 2.0) doc.set_double(section, "kappa", p.kappa());
  if (p.higher_order()) {
    const auto& h = *p.higher_order();
    if (!h.dx.empty()) doc.set(section, "dx", format_monomials(h.dx));
    if (!h.dy.empty()) doc.set(section, "dy", format_monomials(h.dy));
    if (!h.dz.empty()) doc.set(section, "dz", format_monomials(h.dz));
  }
}

IntegratorConfig integrator_from_ini(const IniDocument& doc, const std::string& section) {
  IntegratorConfig cfg;
  cfg.rel_tol = doc.get_double(section, "rel_tol", cfg.rel_tol);
  cfg.abs_tol = doc.get_double(section, "abs_tol", cfg.abs_tol);
  cfg.max_step = doc.get_double(section, "max_step", cfg.max_step);
  cfg.min_step = doc.get_double(section, "min_step", cfg.min_step);
  cfg.initial_step = doc.get_double(section, "initial_step", cfg.initial_step);
  cfg.max_time = doc.get_double(section, "max_time", cfg.max_time);
  cfg.newton_tol = doc.get_double(section, "newton_tol", cfg.newton_tol);
  cfg.newton_max_iters = static_cast<int>(doc.get_int(section, "newton_max_iters", cfg.newton_max_iters));
  const long long steps = doc.get_int(section, "max_steps", static_cast<long long>(cfg.max_steps));
  if (steps <= 0) throw ConfigError("'max_steps' must be positive", doc.line_of(section, "max_steps"));
  cfg.max_steps = static_cast<std::size_t>(steps);
  cfg.event_tol = doc.get_double(section, "event_tol", cfg.event_tol);
  try {
    cfg.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("invalid [") + section + "] settings: " + e.what(), 0);
  }
  return cfg;
}

void integrator_to_ini(const IntegratorConfig& cfg, IniDocument& doc, const std::string& section) {
  doc.set_double(section, "rel_tol", cfg.rel_tol);
  doc.set_double(section, "abs_tol", cfg.abs_tol);
  doc.set_double(section, "max_step", cfg.max_step);
  doc.set_double(section, "min_step", cfg.min_step);
  doc.set_double(section, "initial_step", cfg.initial_step);
  doc.set_double(section, "max_time", cfg.max_time);
  doc.set_double(section, "newton_tol", cfg.newton_tol);
  doc.set(section, "newton_max_iters", std::to_string(cfg.newton_max_iters));
  doc.set(section, "max_steps", std::to_string(cfg.max_steps));
  doc.set_double(section, "event_tol", cfg.event_tol);
}

}  // namespace nlab
