#include "config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "revival/errors.hpp"
#include "revival/fingerprint.hpp"

namespace revival::cli {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

double number(const json& obj, const std::string& where, const char* key,
              double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    throw ConfigError(where + "." + key + ": expected a number");
  }
  return v.get<double>();
}

int integer(const json& obj, const std::string& where, const char* key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError(where + "." + key + ": expected an integer");
  }
  return v.get<int>();
}

bool boolean(const json& obj, const std::string& where, const char* key,
             bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(where + "." + key + ": expected a boolean");
  return v.get<bool>();
}

std::string text(const json& obj, const std::string& where, const char* key,
                 const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

// A number, or "auto" (returned as empty).
std::optional<double> number_or_auto(const json& obj, const std::string& where,
                                     const char* key,
                                     std::optional<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (v.is_string() && v.get<std::string>() == "auto") return std::nullopt;
  if (v.is_number()) return v.get<double>();
  throw ConfigError(where + "." + key + ": expected a number or \"auto\"");
}

std::optional<Band> band(const json& obj, const std::string& where,
                         const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(where + "." + key + ": expected [lo, hi]");
  }
  Band b{v[0].get<double>(), v[1].get<double>()};
  if (!(b.lo > 0.0 && b.hi > b.lo)) {
    throw ConfigError(where + "." + key + ": need 0 < lo < hi");
  }
  return b;
}

json auto_or(const std::optional<double>& v) {
  return v ? json(*v) : json("auto");
}

json band_json(const std::optional<Band>& b) {
  return b ? json::array({b->lo, b->hi}) : json(nullptr);
}

}  // namespace

RunConfig::RunConfig() {
  evolution.t_max = 50.0 * kTwoPi;
}

double RunConfig::resonance_level() const {
  if (resonance.r) return *resonance.r;
  const double r = find_resonant_level(spectrum, resonance.N);
  return resonance.round_r ? std::max(1.0, std::round(r)) : r;
}

ResonanceParams RunConfig::params() const {
  ResonanceParams p;
  p.N = resonance.N;
  p.r = resonance_level();
  p.lambda = resonance.lambda;
  p.V = coupling.V;
  p.hbar_eff = spectrum.hbar_eff;
  return p;
}

double RunConfig::center() const {
  return packet.center ? *packet.center : resonance_level();
}

LevelWindow RunConfig::level_window() const {
  if (window) return *window;
  return default_window(center(), packet.delta_n, resonance.N);
}

MeasureOptions RunConfig::measure_options() const {
  MeasureOptions m;
  m.threshold = analysis.threshold;
  m.min_separation = analysis.min_separation;
  m.t_cl_band = analysis.t_cl_band;
  m.t_rev_band = analysis.t_rev_band;
  m.cl_fraction = analysis.cl_fraction;
  m.fourier_peaks = analysis.fourier_peaks;
  return m;
}

json RunConfig::to_json() const {
  json j;
  j["spectrum"] = {
      {"kind", spectrum.kind == SpectrumModel::Kind::Box ? "box" : "power_law"},
      {"hbar_eff", spectrum.hbar_eff},
      {"c", spectrum.c},
      {"k", spectrum.k}};
  j["coupling"] = {
      {"mode", coupling.mode == CouplingModel::Mode::ConstantV ? "constant_v"
                                                               : "box_position"},
      {"V", coupling.V}};
  j["resonance"] = {{"N", resonance.N},
                    {"r", auto_or(resonance.r)},
                    {"round_r", resonance.round_r},
                    {"lambda", resonance.lambda}};
  j["packet"] = {{"center", auto_or(packet.center)},
                 {"delta_n", packet.delta_n}};
  j["window"] = window ? json{{"n_min", window->n_min}, {"n_max", window->n_max}}
                       : json(nullptr);
  j["evolution"] = {
      {"frame", evolution.frame == Frame::Bare ? "bare" : "rotating"},
      {"rwa", evolution.rwa},
      {"dt", evolution.dt},
      {"t_max", evolution.t_max},
      {"sample_stride", evolution.sample_stride},
      {"integrator",
       evolution.integrator == Integrator::Rk4 ? "rk4" : "exp_midpoint"},
      {"drive_phase", evolution.drive_phase},
      {"edge_population_limit", evolution.edge_population_limit},
      {"norm_drift_limit", evolution.norm_drift_limit}};
  j["analysis"] = {{"threshold", analysis.threshold},
                   {"min_separation", analysis.min_separation},
                   {"t_cl_band", band_json(analysis.t_cl_band)},
                   {"t_rev_band", band_json(analysis.t_rev_band)},
                   {"cl_fraction", analysis.cl_fraction},
                   {"fourier_peaks", analysis.fourier_peaks}};
  j["output"] = {{"svg", svg}};
  j["report"] = {{"mode", to_string(report.mode)},
                 {"convention", revival::to_string(report.convention)},
                 {"jacobian", revival::to_string(report.jacobian)}};
  return j;
}

std::string RunConfig::canonical() const { return to_json().dump(); }

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical()); }

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  require_keys(doc, "config",
               {"spectrum", "coupling", "resonance", "packet", "window",
                "evolution", "analysis", "output", "report"});

  if (doc.contains("spectrum")) {
    const auto& s = doc.at("spectrum");
    const std::string w = "spectrum";
    require_keys(s, w, {"kind", "hbar_eff", "c", "k"});
    const auto kind = text(s, w, "kind", "box");
    const double hbar = number(s, w, "hbar_eff", cfg.spectrum.hbar_eff);
    try {
      if (kind == "box") {
        cfg.spectrum = SpectrumModel::box(hbar);
      } else if (kind == "power_law") {
        cfg.spectrum = SpectrumModel::power_law(number(s, w, "c", 1.0),
                                                number(s, w, "k", 2.0), hbar);
      } else {
        throw ConfigError("spectrum.kind: expected \"box\" or \"power_law\"");
      }
    } catch (const DomainError& e) {
      throw ConfigError(std::string("spectrum: ") + e.what());
    }
  }

  if (doc.contains("coupling")) {
    const auto& c = doc.at("coupling");
    const std::string w = "coupling";
    require_keys(c, w, {"mode", "V"});
    const auto mode = text(c, w, "mode", "constant_v");
    if (mode == "constant_v") {
      cfg.coupling.mode = CouplingModel::Mode::ConstantV;
    } else if (mode == "box_position") {
      cfg.coupling.mode = CouplingModel::Mode::BoxPosition;
    } else {
      throw ConfigError("coupling.mode: expected \"constant_v\" or \"box_position\"");
    }
    cfg.coupling.V = number(c, w, "V", cfg.coupling.V);
  }

  if (doc.contains("resonance")) {
    const auto& r = doc.at("resonance");
    const std::string w = "resonance";
    require_keys(r, w, {"N", "r", "round_r", "lambda"});
    cfg.resonance.N = integer(r, w, "N", 1);
    if (cfg.resonance.N < 1) throw ConfigError("resonance.N must be >= 1");
    cfg.resonance.r = number_or_auto(r, w, "r", std::nullopt);
    if (cfg.resonance.r && !(*cfg.resonance.r >= 1.0)) {
      throw ConfigError("resonance.r must be >= 1");
    }
    cfg.resonance.round_r = boolean(r, w, "round_r", true);
    cfg.resonance.lambda = number(r, w, "lambda", 0.0);
  }

  if (doc.contains("packet")) {
    const auto& p = doc.at("packet");
    const std::string w = "packet";
    require_keys(p, w, {"center", "delta_n"});
    cfg.packet.center = number_or_auto(p, w, "center", std::nullopt);
    cfg.packet.delta_n = number(p, w, "delta_n", cfg.packet.delta_n);
    if (!(cfg.packet.delta_n > 0.0)) throw ConfigError("packet.delta_n must be positive");
  }

  if (doc.contains("window") && !doc.at("window").is_null()) {
    const auto& win = doc.at("window");
    const std::string w = "window";
    require_keys(win, w, {"n_min", "n_max"});
    if (!win.contains("n_min") || !win.contains("n_max")) {
      throw ConfigError("window: both n_min and n_max are required");
    }
    LevelWindow lw{integer(win, w, "n_min", 1), integer(win, w, "n_max", 1)};
    if (lw.n_min < 1 || lw.n_max <= lw.n_min) {
      throw ConfigError("window: need 1 <= n_min < n_max");
    }
    cfg.window = lw;
  }

  if (doc.contains("evolution")) {
    const auto& e = doc.at("evolution");
    const std::string w = "evolution";
    require_keys(e, w,
                 {"frame", "rwa", "dt", "t_max", "periods", "sample_stride",
                  "integrator", "drive_phase", "edge_population_limit",
                  "norm_drift_limit"});
    auto& ev = cfg.evolution;
    const auto frame = text(e, w, "frame", "bare");
    if (frame == "bare") {
      ev.frame = Frame::Bare;
    } else if (frame == "rotating") {
      ev.frame = Frame::Rotating;
    } else {
      throw ConfigError("evolution.frame: expected \"bare\" or \"rotating\"");
    }
    ev.rwa = boolean(e, w, "rwa", false);
    ev.dt = number(e, w, "dt", ev.dt);
    if (e.contains("t_max") && e.contains("periods")) {
      throw ConfigError("evolution: give either t_max or periods, not both");
    }
    if (e.contains("periods")) {
      ev.t_max = number(e, w, "periods", 50.0) * kTwoPi * cfg.resonance.N;
    } else {
      ev.t_max = number(e, w, "t_max", ev.t_max);
    }
    ev.sample_stride = integer(e, w, "sample_stride", 1);
    const auto integ = text(e, w, "integrator", "exp_midpoint");
    if (integ == "exp_midpoint") {
      ev.integrator = Integrator::ExpMidpoint;
    } else if (integ == "rk4") {
      ev.integrator = Integrator::Rk4;
    } else {
      throw ConfigError("evolution.integrator: expected \"exp_midpoint\" or \"rk4\"");
    }
    ev.drive_phase = number(e, w, "drive_phase", 0.0);
    ev.edge_population_limit =
        number(e, w, "edge_population_limit", ev.edge_population_limit);
    ev.norm_drift_limit = number(e, w, "norm_drift_limit", ev.norm_drift_limit);
    if (!(ev.dt > 0.0) || ev.dt > kTwoPi / 100.0 * (1.0 + 1e-12)) {
      throw ConfigError("evolution.dt must lie in (0, 2 pi / 100]");
    }
    if (!(ev.t_max > 0.0)) throw ConfigError("evolution.t_max must be positive");
    if (ev.sample_stride < 1) throw ConfigError("evolution.sample_stride must be >= 1");
  }

  if (doc.contains("analysis")) {
    const auto& a = doc.at("analysis");
    const std::string w = "analysis";
    require_keys(a, w,
                 {"threshold", "min_separation", "t_cl_band", "t_rev_band",
                  "cl_fraction", "fourier_peaks"});
    auto& an = cfg.analysis;
    an.threshold = number(a, w, "threshold", an.threshold);
    if (!(an.threshold > 0.0 && an.threshold < 1.0)) {
      throw ConfigError("analysis.threshold must lie in (0, 1)");
    }
    an.min_separation = number(a, w, "min_separation", an.min_separation);
    an.t_cl_band = band(a, w, "t_cl_band");
    an.t_rev_band = band(a, w, "t_rev_band");
    an.cl_fraction = number(a, w, "cl_fraction", an.cl_fraction);
    an.fourier_peaks = integer(a, w, "fourier_peaks", an.fourier_peaks);
  }

  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    require_keys(o, "output", {"svg"});
    cfg.svg = boolean(o, "output", "svg", false);
  }

  if (doc.contains("report")) {
    const auto& r = doc.at("report");
    const std::string w = "report";
    require_keys(r, w, {"mode", "convention", "jacobian"});
    cfg.report.mode = parse_mode(text(r, w, "mode", "both"));
    cfg.report.convention = parse_convention(text(r, w, "convention", "paperq"));
    cfg.report.jacobian = parse_jacobian(text(r, w, "jacobian", "as_printed"));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

ReportModes parse_mode(const std::string& s) {
  if (s == "definition") return ReportModes::Definition;
  if (s == "paper") return ReportModes::Paper;
  if (s == "both") return ReportModes::Both;
  throw ConfigError("mode: expected definition, paper or both");
}

Convention parse_convention(const std::string& s) {
  if (s == "paperq") return Convention::PaperQ;
  if (s == "stdq") return Convention::StandardQ;
  throw ConfigError("convention: expected paperq or stdq");
}

Jacobian parse_jacobian(const std::string& s) {
  if (s == "as_printed") return Jacobian::AsPrinted;
  if (s == "strict") return Jacobian::Strict;
  throw ConfigError("jacobian: expected as_printed or strict");
}

const char* to_string(ReportModes m) {
  switch (m) {
    case ReportModes::Definition:
      return "definition";
    case ReportModes::Paper:
      return "paper";
    case ReportModes::Both:
      return "both";
  }
  return "both";
}

}  // namespace revival::cli
