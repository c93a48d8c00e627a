#include "revival/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <ostream>

#include "revival/errors.hpp"
#include "revival/fingerprint.hpp"

namespace revival {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double check_uniform(std::span<const double> times) {
  if (times.size() < 3) {
    throw TraceTooShort("trace has " + std::to_string(times.size()) +
                        " samples; at least 3 are required");
  }
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw AnalysisInputError("trace times must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double step = times[i] - times[i - 1];
    if (std::abs(step - dt) > 1e-6 * dt) {
      throw AnalysisInputError("trace is not uniformly sampled");
    }
  }
  return dt;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Vertex offset (in samples) of the parabola through (-1, a), (0, b), (1, c).
double vertex_offset(double a, double b, double c) {
  const double denom = a - 2.0 * b + c;
  if (denom == 0.0) return 0.0;
  return std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
}

// Largest y within +-half samples of each sample (window clipped to the trace).
std::vector<double> centered_maximum(std::span<const double> y, std::size_t half) {
  const std::size_t n = y.size();
  std::vector<double> out(n);
  std::deque<std::size_t> q;  // indices with decreasing values
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t hi = std::min(n - 1, i + half);
    for (; next <= hi; ++next) {
      while (!q.empty() && y[q.back()] <= y[next]) q.pop_back();
      q.push_back(next);
    }
    while (q.front() + half < i) q.pop_front();
    out[i] = y[q.front()];
  }
  return out;
}

void fft(std::vector<cplx>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -kTwoPi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx w = std::polar(1.0, ang * static_cast<double>(k));
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

std::vector<SpectralPeak> spectral_peaks(std::span<const double> y, double dt,
                                         int count) {
  if (count <= 0) return {};
  const std::size_t n = y.size();
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);

  std::size_t padded = 1;
  while (padded < n) padded <<= 1;
  std::vector<cplx> buf(padded, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) buf[i] = y[i] - mean;
  fft(buf);

  const std::size_t half = padded / 2;
  std::vector<double> mag(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    mag[k] = 2.0 * std::abs(buf[k]) / static_cast<double>(n);
  }
  std::vector<SpectralPeak> peaks;
  for (std::size_t k = 1; k < half; ++k) {
    if (mag[k] > mag[k - 1] && mag[k] >= mag[k + 1] && mag[k] > 0.0) {
      peaks.push_back({kTwoPi * static_cast<double>(k) /
                           (static_cast<double>(padded) * dt),
                       mag[k]});
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const SpectralPeak& a, const SpectralPeak& b) {
                     return a.amplitude > b.amplitude;
                   });
  if (peaks.size() > static_cast<std::size_t>(count)) peaks.resize(count);
  return peaks;
}

}  // namespace

std::vector<Peak> detect_peaks(std::span<const double> times,
                               std::span<const double> abs2, double threshold,
                               double min_separation) {
  if (times.size() != abs2.size()) {
    throw AnalysisInputError("times and values differ in length");
  }
  const double dt = check_uniform(times);
  const std::size_t n = abs2.size();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  // Samples closer than this count as equal, so rounding noise on a flat
  // stretch does not split it into spurious maxima.
  auto tol = [](double v) { return 1e-12 * std::max(1.0, std::abs(v)); };

  std::vector<Peak> candidates;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(abs2[j + 1] - abs2[i]) <= tol(abs2[i])) ++j;
    const double left = i == 0 ? kNegInf : abs2[i - 1];
    double right;
    if (j + 1 < n) {
      right = abs2[j + 1];
    } else {
      // A plateau running into the end is only a maximum if it is the whole
      // trace; a rising tail is unconfirmed.
      right = i == 0 ? kNegInf : std::numeric_limits<double>::infinity();
    }
    const double y = abs2[i];
    if (y >= threshold && left < y - tol(y) && right < y - tol(y)) {
      Peak p{times[i], y};
      if (i == j && i > 0 && j + 1 < n) {
        const double d = vertex_offset(abs2[i - 1], y, abs2[i + 1]);
        p.t = times[i] + d * dt;
        p.abs2 = y - 0.25 * (abs2[i - 1] - abs2[i + 1]) * d;
      }
      candidates.push_back(p);
    }
    i = j + 1;
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Peak& a, const Peak& b) { return a.abs2 > b.abs2; });
  std::vector<Peak> kept;
  for (const auto& c : candidates) {
    const bool clear = std::all_of(kept.begin(), kept.end(), [&](const Peak& k) {
      return std::abs(k.t - c.t) >= min_separation;
    });
    if (clear) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Peak& a, const Peak& b) { return a.t < b.t; });
  return kept;
}

std::vector<Peak> detect_peaks(const AutocorrTrace& trace, double threshold,
                               double min_separation) {
  std::vector<double> y(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) y[i] = trace.abs2(i);
  return detect_peaks(trace.times, y, threshold, min_separation);
}

RevivalReport measure_timescales(const AutocorrTrace& trace,
                                 const MeasureOptions& options) {
  const double dt = check_uniform(trace.times);
  const std::size_t n = trace.size();
  const double t0 = trace.times.front();
  const double duration = trace.times.back() - t0;

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = trace.abs2(i);

  double min_sep = options.min_separation;
  if (min_sep <= 0.0 && options.t_cl_band) min_sep = 0.5 * options.t_cl_band->lo;

  RevivalReport rep;
  rep.peaks = detect_peaks(trace.times, y, options.threshold, min_sep);
  rep.spectrum_peaks = spectral_peaks(y, dt, options.fourier_peaks);

  // Classical period.
  if (options.t_cl_band && duration < 5.0 * options.t_cl_band->mid()) {
    rep.notes.push_back("T_cl: trace shorter than 5 expected classical periods");
  } else {
    const double limit = t0 + options.cl_fraction * duration;
    std::vector<double> early;
    for (const auto& p : rep.peaks) {
      if (p.t <= limit) early.push_back(p.t);
    }
    if (early.size() < 3) {
      rep.notes.push_back("T_cl: fewer than 3 peaks in the early window");
    } else {
      std::vector<double> gaps;
      for (std::size_t k = 1; k < early.size(); ++k) gaps.push_back(early[k] - early[k - 1]);
      rep.T_cl_measured = median(gaps);
    }
  }

  // Revival time.
  std::optional<double> period = rep.T_cl_measured;
  if (!period && options.t_cl_band) period = options.t_cl_band->mid();
  if (!period) {
    rep.notes.push_back("T_rev: no classical period to set the smoothing width");
    return rep;
  }
  const auto half = static_cast<std::size_t>(std::lround(0.5 * *period / dt));
  const auto env = centered_maximum(y, half);

  const double floor = env.front() / std::exp(1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (env[i] < floor) {
      rep.collapse_time = trace.times[i] - t0;
      break;
    }
  }

  double lo;
  double hi;
  if (options.t_rev_band) {
    if (duration < 1.5 * options.t_rev_band->mid()) {
      rep.notes.push_back("T_rev: trace shorter than 1.5 expected revival times");
      return rep;
    }
    lo = options.t_rev_band->lo;
    hi = options.t_rev_band->hi;
  } else {
    if (!rep.collapse_time) {
      rep.notes.push_back("T_rev: no collapse of the envelope");
      return rep;
    }
    lo = 3.0 * *rep.collapse_time;
    hi = duration;
  }

  std::size_t best = n;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = trace.times[i] - t0;
    if (t < lo || t > hi) continue;
    if (best == n || y[i] > y[best]) best = i;
  }
  if (best == n) {
    rep.notes.push_back("T_rev: search band lies outside the trace");
    return rep;
  }
  if (best + half >= n - 1) {
    rep.notes.push_back("T_rev: envelope still rising at the end of the trace");
    return rep;
  }
  if (env[best] < floor) {
    rep.notes.push_back("T_rev: no recurrence of the envelope");
    return rep;
  }
  double t_rev = trace.times[best] - t0;
  if (best > 0) t_rev += vertex_offset(y[best - 1], y[best], y[best + 1]) * dt;
  rep.T_rev_measured = t_rev;
  return rep;
}

void compare(RevivalReport& report,
             std::span<const TimeScalesReport> predictions) {
  auto add = [&](const char* scale, const char* mode, double predicted,
                 const std::optional<double>& measured) {
    if (!measured) {
      report.omitted.push_back({scale, mode, "not measured from this trace"});
      return;
    }
    if (std::isinf(predicted) || !(predicted > 0.0)) {
      report.omitted.push_back({scale, mode, "prediction is not a finite period"});
      return;
    }
    report.comparison.push_back({scale, mode, predicted, *measured,
                                 std::abs(*measured - predicted) / predicted});
  };

  for (const auto& p : predictions) {
    if (p.definition) {
      add("T_cl", "definition", p.definition->T_cl, report.T_cl_measured);
      if (p.T_cl_lab) add("T_cl_lab", "definition", *p.T_cl_lab, report.T_cl_measured);
      add("T_rev", "definition", p.definition->T_rev, report.T_rev_measured);
      report.omitted.push_back({"T_sr", "definition",
                                "super-revival is validated analytically, not from traces"});
    }
    if (p.paper) {
      add("T_cl", "paper", p.paper->T_cl, report.T_cl_measured);
      add("T_rev", "paper", p.paper->T_rev, report.T_rev_measured);
      report.omitted.push_back({"T_sr", "paper",
                                "super-revival is validated analytically, not from traces"});
    }
  }
}

void write_report_csv(std::ostream& out, const RevivalReport& report,
                      std::uint64_t config_hash) {
  out << provenance_line(config_hash) << '\n';
  for (const auto& o : report.omitted) {
    out << "# omitted " << o.scale << ' ' << o.mode << ": " << o.reason << '\n';
  }
  out << "scale,mode,predicted,measured,rel_error\n";
  for (const auto& r : report.comparison) {
    out << r.scale << ',' << r.mode << ',' << format_number(r.predicted) << ','
        << format_number(r.measured) << ',' << format_number(r.rel_error) << '\n';
  }
}

void write_peaks_csv(std::ostream& out, const RevivalReport& report,
                     std::uint64_t config_hash) {
  out << provenance_line(config_hash) << '\n';
  out << "t,abs_A2\n";
  for (const auto& p : report.peaks) {
    out << format_number(p.t) << ',' << format_number(p.abs2) << '\n';
  }
}

}  // namespace revival
