#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "revival/analysis.hpp"
#include "revival/propagate.hpp"
#include "revival/quasienergy.hpp"
#include "revival/spectrum.hpp"

namespace revival::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResonanceSpec {
  int N = 1;
  std::optional<double> r;  // empty: solve N E'(r) = hbar_eff
  bool round_r = true;      // round a solved r to the nearest level
  double lambda = 0.0;
};

struct PacketSpec {
  std::optional<double> center;  // empty: the resonance centre r
  double delta_n = 2.0;
};

struct AnalysisSpec {
  double threshold = 0.5;
  double min_separation = 0.0;
  std::optional<Band> t_cl_band;
  std::optional<Band> t_rev_band;
  double cl_fraction = 0.1;
  int fourier_peaks = 5;
};

struct ReportSpec {
  ReportModes mode = ReportModes::Both;
  Convention convention = Convention::PaperQ;
  Jacobian jacobian = Jacobian::AsPrinted;
};

/// Everything a run depends on. Serializes to a canonical JSON document whose
/// FNV-1a hash stamps every output file.
struct RunConfig {
  SpectrumModel spectrum = SpectrumModel::box(0.001);
  CouplingModel coupling;
  ResonanceSpec resonance;
  PacketSpec packet;
  std::optional<LevelWindow> window;
  EvolutionConfig evolution;
  AnalysisSpec analysis;
  bool svg = false;
  ReportSpec report;

  RunConfig();

  /// Resonance centre actually used (solved and rounded when requested).
  double resonance_level() const;
  ResonanceParams params() const;
  double center() const;
  LevelWindow level_window() const;
  MeasureOptions measure_options() const;

  nlohmann::json to_json() const;
  std::string canonical() const;
  std::uint64_t hash() const;
};

/// Strict parse: unknown keys, wrong types and invalid values throw
/// ConfigError. Missing keys take defaults.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

ReportModes parse_mode(const std::string& s);
Convention parse_convention(const std::string& s);
Jacobian parse_jacobian(const std::string& s);
const char* to_string(ReportModes m);

}  // namespace revival::cli
