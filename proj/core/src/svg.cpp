#include "nlab/svg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <ostream>
#include <sstream>


namespace nlab {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

std::string tick_label(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;

  double map(double v) const { return log ? std::log10(v) : v; }
  double unmap(double u) const { return log ? std::pow(10.0, u) : u; }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

Axis make_axis(const PlotSpec& spec, bool is_x) {
  Axis a;
  a.log = is_x ? spec.log_x : spec.log_y;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : spec.series) {
    const auto& v = is_x ? s.xs : s.ys;
    for (double d : v) {
      if (!a.usable(d)) continue;
      lo = std::min(lo, a.map(d));
      hi = std::max(hi, a.map(d));
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    const double pad = std::max(1e-3, std::abs(hi) * 0.05);
    lo -= pad;
    hi += pad;
  } else if (!a.log) {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

}  // namespace

void write_svg(std::ostream& os, const PlotSpec& spec) {
  const double W = spec.width, H = spec.height;
  const double left = 80, right = 180, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  const Axis ax = make_axis(spec, true), ay = make_axis(spec, false);
  auto px = [&](double x) { return left + (ax.map(x) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double y) { return top + ph - (ay.map(y) - ay.lo) / (ay.hi - ay.lo) * ph; };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
     << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(spec.title)
     << "</text>\n";
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double u = static_cast<double>(i) / kTicks;
    const double xv = ax.unmap(ax.lo + u * (ax.hi - ax.lo));
    const double yv = ay.unmap(ay.lo + u * (ay.hi - ay.lo));
    const double gx = left + u * pw, gy = top + ph - u * ph;
    os << "<line x1=\"" << num(gx) << "\" y1=\"" << num(top) << "\" x2=\"" << num(gx) << "\" y2=\"" << num(top + ph)
       << "\" stroke=\"#e0e0e0\"/>\n";
    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(gy) << "\" x2=\"" << num(left + pw) << "\" y2=\"" << num(gy)
       << "\" stroke=\"#e0e0e0\"/>\n";
    os << "<text x=\"" << num(gx) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
       << escape(tick_label(xv)) << "</text>\n";
    os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(gy + 4) << "\" text-anchor=\"end\">"
       << escape(tick_label(yv)) << "</text>\n";
  }
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(H - 15) << "\" text-anchor=\"middle\">"
     << escape(spec.x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << num(top + ph / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

  double legend_y = top + 10;
  for (const auto& s : spec.series) {
    std::string points;
    const std::size_t n = std::min(s.xs.size(), s.ys.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!ax.usable(s.xs[i]) || !ay.usable(s.ys[i])) continue;
      if (s.markers) {
        os << "<circle cx=\"" << num(px(s.xs[i])) << "\" cy=\"" << num(py(s.ys[i])) << "\" r=\"2\" fill=\"" << s.color
           << "\"/>\n";
      } else {
        points += num(px(s.xs[i])) + "," + num(py(s.ys[i])) + " ";
      }
    }
    if (!points.empty()) {
      points.pop_back();
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"" << points
         << "\"/>\n";
    }
    os << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(legend_y) << "\" x2=\"" << num(left + pw + 36)
       << "\" y2=\"" << num(legend_y) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(left + pw + 42) << "\" y=\"" << num(legend_y + 4) << "\">" << escape(s.label)
       << "</text>\n";
    legend_y += 18;
  }
  if (spec.timestamp) {
    os << "<text x=\"" << num(W - 6) << "\" y=\"" << num(H - 6) << "\" text-anchor=\"end\" font-size=\"9\" fill=\"#888\">"
       << escape(*spec.timestamp) << "</text>\n";
  }
  os << "</svg>\n";
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace nlab
