#include "svg.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

#include "revival/fingerprint.hpp"

namespace revival::cli {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 300.0;
constexpr double kMargin = 40.0;
constexpr std::size_t kMaxPoints = 4000;

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace

void write_trace_svg(std::ostream& out, const AutocorrTrace& trace,
                     std::uint64_t config_hash) {
  out << "<!-- " << provenance_line(config_hash).substr(2) << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const double x0 = kMargin, x1 = kWidth - 10.0;
  const double y0 = kHeight - kMargin, y1 = 10.0;
  out << "<path d=\"M" << x0 << ' ' << y1 << " V" << y0 << " H" << x1
      << "\" stroke=\"black\" fill=\"none\"/>\n";

  const double t_lo = trace.size() ? trace.times.front() : 0.0;
  const double t_hi = trace.size() ? trace.times.back() : 1.0;
  const double span = t_hi > t_lo ? t_hi - t_lo : 1.0;

  out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\" points=\"";
  const std::size_t stride = std::max<std::size_t>(1, trace.size() / kMaxPoints);
  for (std::size_t i = 0; i < trace.size(); i += stride) {
    // Keep the maximum inside each bucket so narrow revival peaks survive.
    std::size_t best = i;
    for (std::size_t j = i; j < std::min(trace.size(), i + stride); ++j) {
      if (trace.abs2(j) > trace.abs2(best)) best = j;
    }
    const double x = x0 + (trace.times[best] - t_lo) / span * (x1 - x0);
    const double y = y0 - std::clamp(trace.abs2(best), 0.0, 1.0) * (y0 - y1);
    out << fixed(x) << ',' << fixed(y) << ' ';
  }
  out << "\"/>\n";

  out << "<text x=\"" << x0 << "\" y=\"" << kHeight - 12.0
      << "\" font-size=\"12\">t = " << format_number(t_lo) << "</text>\n";
  out << "<text x=\"" << x1 << "\" y=\"" << kHeight - 12.0
      << "\" font-size=\"12\" text-anchor=\"end\">t = " << format_number(t_hi)
      << "</text>\n";
  out << "<text x=\"4\" y=\"" << y1 + 10.0
      << "\" font-size=\"12\">|A|^2 = 1</text>\n";
  out << "</svg>\n";
}

}  // namespace revival::cli
