#pragma once

// Self-contained SVG line plots (no scripts, fonts or external references).

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nlab {

struct PlotSeries {
  std::string label;
  std::string color;  ///< any SVG color, e.g. "#d62728"
  std::vector<double> xs;
  std::vector<double> ys;
  bool markers = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<PlotSeries> series;
  /// Printed in the lower right corner when present.
  std::optional<std::string> timestamp;
  int width = 800;
  int height = 500;
};

/// Non-finite points (and nonpositive ones on log axes) are skipped.
void write_svg(std::ostream& os, const PlotSpec& spec);

/// Current UTC time as ISO-8601, for PlotSpec::timestamp.
std::string utc_timestamp();

}  // namespace nlab
