#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "revival/propagate.hpp"
#include "revival/quasienergy.hpp"

namespace revival {

struct Peak {
  double t = 0.0;
  double abs2 = 0.0;
};

struct Band {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
};

struct SpectralPeak {
  double omega = 0.0;      // angular frequency
  double amplitude = 0.0;  // single-sided amplitude of |A|^2 - mean
};

struct ComparisonRow {
  std::string scale;  // T_cl, T_cl_lab, T_rev
  std::string mode;   // definition, paper
  double predicted = 0.0;
  double measured = 0.0;
  double rel_error = 0.0;
};

struct OmittedRow {
  std::string scale;
  std::string mode;
  std::string reason;
};

struct RevivalReport {
  std::vector<Peak> peaks;
  std::optional<double> T_cl_measured;
  std::optional<double> T_rev_measured;  // measured from the trace start
  std::optional<double> collapse_time;
  std::vector<SpectralPeak> spectrum_peaks;
  std::vector<ComparisonRow> comparison;
  std::vector<OmittedRow> omitted;
  std::vector<std::string> notes;  // why a scale is Absent
};

struct MeasureOptions {
  double threshold = 0.5;
  /// Zero picks half the lower edge of t_cl_band, or no minimum without a band.
  double min_separation = 0.0;
  std::optional<Band> t_cl_band;
  std::optional<Band> t_rev_band;
  /// Fraction of the trace searched for classical-period peaks.
  double cl_fraction = 0.1;
  int fourier_peaks = 5;
};

/// Local maxima of |A|^2 at or above threshold, at least min_separation apart
/// (higher peaks win), in increasing time. Interior maxima are refined by a
/// parabola through three samples; plateaus report their first sample.
/// Throws TraceTooShort for fewer than 3 samples and AnalysisInputError for
/// non-uniform sampling.
std::vector<Peak> detect_peaks(std::span<const double> times,
                               std::span<const double> abs2, double threshold,
                               double min_separation);
std::vector<Peak> detect_peaks(const AutocorrTrace& trace, double threshold,
                               double min_separation);

/// Classical period from the median spacing of early peaks. The envelope is
/// the centered one-period moving maximum of |A|^2; collapse is where it first
/// drops below 1/e of its start, and the revival time is the highest sample
/// beyond three collapse times (or inside t_rev_band), refined by a parabola. Scales the trace cannot support are
/// left empty, with a note.
RevivalReport measure_timescales(const AutocorrTrace& trace,
                                 const MeasureOptions& options = {});

/// Fills report.comparison / report.omitted against each prediction.
/// Super-revival rows are always omitted: T_sr is validated analytically.
void compare(RevivalReport& report,
             std::span<const TimeScalesReport> predictions);

/// "scale,mode,predicted,measured,rel_error".
void write_report_csv(std::ostream& out, const RevivalReport& report,
                      std::uint64_t config_hash);
/// "t,abs_A2".
void write_peaks_csv(std::ostream& out, const RevivalReport& report,
                     std::uint64_t config_hash);

}  // namespace revival
