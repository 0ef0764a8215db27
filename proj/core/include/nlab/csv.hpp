#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nlab {

/// 17 significant digits, `%.17g` style; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_shortest(double v);

/// Parses a decimal produced by either formatter (or any from_chars-compatible text).
/// Returns false on trailing garbage or an empty field.
bool parse_double(std::string_view text, double& out);

/// `# key: value` lines written ahead of a CSV header.
using Metadata = std::vector<std::pair<std::string, std::string>>;
void write_metadata(std::ostream& os, const Metadata& meta);

/// Minimal reader for the files this library writes: skips `#` lines, splits on commas.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  Metadata metadata;

  /// Column index by name, or -1.
  int column(std::string_view name) const;
};

CsvTable read_csv(std::istream& is);

}  // namespace nlab
