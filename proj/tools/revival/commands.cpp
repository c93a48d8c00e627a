#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "revival/errors.hpp"
#include "revival/fingerprint.hpp"
#include "revival/mathieu.hpp"
#include "selfcheck.hpp"
#include "svg.hpp"

namespace revival::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::ofstream open_output(const Context& ctx, const std::string& name) {
  fs::create_directories(ctx.out_dir);
  const auto path = fs::path(ctx.out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  return f;
}

ordered_json num(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

ordered_json mode_json(const ModeTimes& m) {
  return {{"T_cl", num(m.T_cl)},       {"T_rev", num(m.T_rev)},
          {"T_sr", num(m.T_sr)},       {"sign_cl", m.sign_cl},
          {"sign_rev", m.sign_rev},    {"sign_sr", m.sign_sr}};
}

ordered_json report_json(const TimeScalesReport& rep, std::uint64_t hash) {
  ordered_json j;
  j["provenance"] = provenance_line(hash).substr(2);
  j["nu_r"] = num(rep.nu_r);
  j["q_used"] = num(rep.q_used);
  j["beta"] = num(rep.beta);
  j["hbar_eff"] = num(rep.hbar_eff);
  j["N"] = rep.N;
  j["convention"] = to_string(rep.convention);
  j["jacobian"] = to_string(rep.jacobian);
  j["large_lambda_warning"] = rep.large_lambda_warning;
  j["eps_derivs"] = {num(rep.eps_derivs[0]), num(rep.eps_derivs[1]),
                     num(rep.eps_derivs[2])};
  if (rep.definition) j["definition"] = mode_json(*rep.definition);
  if (rep.paper) j["paper"] = mode_json(*rep.paper);
  if (rep.T_cl_lab) j["T_cl_lab"] = num(*rep.T_cl_lab);
  if (rep.discrepancy) {
    const auto& d = *rep.discrepancy;
    j["discrepancy"] = {{"T_cl", num(d.T_cl)},
                        {"T_rev", num(d.T_rev)},
                        {"T_sr", num(d.T_sr)},
                        {"jacobian_factor", num(d.jacobian_factor)}};
  }
  return j;
}

void print_table(std::ostream& out, const TimeScalesReport& rep) {
  auto cell = [](std::optional<double> x) {
    return x ? format_number(*x) : std::string("-");
  };
  out << "nu_r = " << format_number(rep.nu_r)
      << "  q = " << format_number(rep.q_used)
      << "  beta = " << format_number(rep.beta) << "  N = " << rep.N << "  ("
      << to_string(rep.convention) << ", " << to_string(rep.jacobian) << ")\n";
  out << std::left << std::setw(8) << "scale" << std::setw(26) << "definition"
      << std::setw(26) << "paper" << "rel_diff\n";
  auto line = [&](const char* name, auto field, std::optional<double> diff) {
    std::optional<double> d, p;
    if (rep.definition) d = (*rep.definition).*field;
    if (rep.paper) p = (*rep.paper).*field;
    out << std::left << std::setw(8) << name << std::setw(26) << cell(d)
        << std::setw(26) << cell(p) << cell(diff) << '\n';
  };
  const auto& disc = rep.discrepancy;
  line("T_cl", &ModeTimes::T_cl,
       disc ? std::optional<double>(disc->T_cl) : std::nullopt);
  line("T_rev", &ModeTimes::T_rev,
       disc ? std::optional<double>(disc->T_rev) : std::nullopt);
  line("T_sr", &ModeTimes::T_sr,
       disc ? std::optional<double>(disc->T_sr) : std::nullopt);
  if (rep.T_cl_lab) {
    out << std::left << std::setw(8) << "T_cl_lab" << ' '
        << format_number(*rep.T_cl_lab) << '\n';
  }
  if (rep.large_lambda_warning) {
    out << "warning: lambda >= 0.5, perturbative time scales are unreliable\n";
  }
}

TimeScalesReport report_for(const RunConfig& cfg) {
  return time_scales(cfg.spectrum, cfg.params(), cfg.center(), cfg.report.mode,
                     cfg.report.convention, cfg.report.jacobian);
}

EvolutionResult run_evolution(const RunConfig& cfg) {
  const auto params = cfg.params();
  const auto window = cfg.level_window();
  const auto psi0 = init_gaussian(cfg.center(), cfg.packet.delta_n, window);
  if (cfg.evolution.rwa) {
    if (cfg.coupling.mode != CouplingModel::Mode::ConstantV) {
      throw DomainError("the RWA system needs constant_v coupling");
    }
    return evolve_rwa(psi0, cfg.spectrum, params, cfg.evolution);
  }
  const auto V = coupling_matrix(cfg.coupling, window.n_min, window.n_max,
                                 params.N);
  return evolve(psi0, cfg.spectrum, V, params, cfg.evolution);
}

std::string opt_number(const std::optional<double>& x) {
  return x ? format_number(*x) : std::string();
}

}  // namespace

int cmd_times(const Context& ctx) {
  const auto rep = report_for(ctx.config);
  const auto j = report_json(rep, ctx.config.hash());
  auto f = open_output(ctx, "times.json");
  f << j.dump() << '\n';
  print_table(*ctx.out, rep);
  *ctx.out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_mathieu(const Context& ctx, const std::vector<double>& nus,
                const std::vector<double>& qs) {
  std::ostringstream csv;
  csv << provenance_line(ctx.config.hash()) << '\n';
  csv << "nu,q,a_series,a_matrix,gap\n";
  for (double nu : nus) {
    for (double q : qs) {
      const double s = char_value_series(nu, q);
      const double m = char_value_converged(nu, q).a;
      csv << format_number(nu) << ',' << format_number(q) << ','
          << format_number(s) << ',' << format_number(m) << ','
          << format_number(std::abs(s - m)) << '\n';
    }
  }
  auto f = open_output(ctx, "mathieu.csv");
  f << csv.str();
  *ctx.out << csv.str();
  return kExitOk;
}

int cmd_evolve(const Context& ctx) {
  const auto& cfg = ctx.config;
  const auto hash = cfg.hash();
  const auto res = run_evolution(cfg);
  {
    auto f = open_output(ctx, "trace.csv");
    write_trace_csv(f, res.trace, hash);
  }
  if (cfg.svg) {
    auto f = open_output(ctx, "trace.svg");
    write_trace_svg(f, res.trace, hash);
  }
  *ctx.out << "samples " << res.trace.size() << "  max_norm_drift "
           << format_number(res.max_norm_drift) << "  max_edge_population "
           << format_number(res.max_edge_population) << "  trace "
           << hex64(res.trace.fingerprint) << '\n';
  return kExitOk;
}

int cmd_analyze(const Context& ctx, const std::vector<std::string>& traces) {
  const auto& cfg = ctx.config;
  const auto hash = cfg.hash();
  auto modes = cfg;
  modes.report.mode = ReportModes::Both;
  const std::vector<TimeScalesReport> predictions{report_for(modes)};

  for (const auto& path : traces) {
    std::ifstream in(path);
    if (!in) throw AnalysisInputError("cannot open trace '" + path + "'");
    const auto trace = read_trace_csv(in);
    auto report = measure_timescales(trace, cfg.measure_options());
    compare(report, predictions);

    const auto stem = fs::path(path).stem().string();
    {
      auto f = open_output(ctx, stem + ".report.csv");
      write_report_csv(f, report, hash);
    }
    {
      auto f = open_output(ctx, stem + ".peaks.csv");
      write_peaks_csv(f, report, hash);
    }
    *ctx.out << path << ": " << report.peaks.size() << " peaks  T_cl "
             << (report.T_cl_measured ? format_number(*report.T_cl_measured)
                                      : "absent")
             << "  T_rev "
             << (report.T_rev_measured ? format_number(*report.T_rev_measured)
                                       : "absent")
             << '\n';
    for (const auto& note : report.notes) *ctx.out << "  note: " << note << '\n';
  }
  return kExitOk;
}

SweepParam parse_sweep_param(const std::string& s) {
  if (s == "lambda") return SweepParam::Lambda;
  if (s == "hbar_eff") return SweepParam::HbarEff;
  if (s == "delta_n") return SweepParam::DeltaN;
  throw ConfigError("sweep parameter must be lambda, hbar_eff or delta_n");
}

const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::Lambda:
      return "lambda";
    case SweepParam::HbarEff:
      return "hbar_eff";
    case SweepParam::DeltaN:
      return "delta_n";
  }
  return "lambda";
}

std::vector<double> parse_grid(const std::string& spec) {
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) {
      throw ConfigError("bad grid value '" + s + "'");
    }
    return v;
  };
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw ConfigError("log grid is lo:hi:count");
    const double lo = to_double(parts[0]);
    const double hi = to_double(parts[1]);
    const int count = static_cast<int>(to_double(parts[2]));
    if (!(lo > 0.0 && hi > 0.0) || count < 1) {
      throw ConfigError("log grid needs positive bounds and count >= 1");
    }
    for (int i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      grid.push_back(lo * std::pow(hi / lo, f));
    }
    return grid;
  }
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ',');) {
    grid.push_back(to_double(item));
  }
  if (grid.empty()) throw ConfigError("empty grid");
  return grid;
}

namespace {

struct SweepRow {
  double value = 0.0;
  TimeScalesReport report;
  std::optional<double> T_cl_measured;
  std::optional<double> T_rev_measured;
};

SweepRow sweep_point(RunConfig cfg, SweepParam param, double value,
                     bool measure) {
  switch (param) {
    case SweepParam::Lambda:
      cfg.resonance.lambda = value;
      break;
    case SweepParam::HbarEff:
      if (cfg.spectrum.kind == SpectrumModel::Kind::Box) {
        cfg.spectrum = SpectrumModel::box(value);
      } else {
        cfg.spectrum =
            SpectrumModel::power_law(cfg.spectrum.c, cfg.spectrum.k, value);
      }
      break;
    case SweepParam::DeltaN:
      cfg.packet.delta_n = value;
      break;
  }
  cfg.report.mode = ReportModes::Both;
  SweepRow row;
  row.value = value;
  row.report = report_for(cfg);
  if (measure) {
    const auto res = run_evolution(cfg);
    const auto rep = measure_timescales(res.trace, cfg.measure_options());
    row.T_cl_measured = rep.T_cl_measured;
    row.T_rev_measured = rep.T_rev_measured;
  }
  return row;
}

}  // namespace

int cmd_sweep(const Context& ctx, SweepParam param, std::vector<double> grid,
              bool measure, unsigned threads) {
  std::vector<double> unique;
  for (double v : grid) {
    if (std::find(unique.begin(), unique.end(), v) != unique.end()) {
      *ctx.err << "warning: duplicate grid value " << format_number(v)
               << " ignored\n";
      continue;
    }
    unique.push_back(v);
  }
  threads = std::max(1u, threads);

  std::vector<SweepRow> rows(unique.size());
  for (std::size_t start = 0; start < unique.size(); start += threads) {
    const std::size_t stop = std::min(unique.size(), start + threads);
    std::vector<std::future<SweepRow>> batch;
    for (std::size_t i = start; i < stop; ++i) {
      batch.push_back(std::async(std::launch::async, sweep_point, ctx.config,
                                 param, unique[i], measure));
    }
    for (std::size_t i = start; i < stop; ++i) rows[i] = batch[i - start].get();
  }

  std::ostringstream csv;
  csv << provenance_line(ctx.config.hash()) << '\n';
  csv << "param,value,T_cl_def,T_cl_paper,T_rev_def,T_rev_paper,T_sr_def,"
         "T_sr_paper,T_cl_lab,T_cl_measured,T_rev_measured\n";
  for (const auto& r : rows) {
    const auto& d = *r.report.definition;
    const auto& p = *r.report.paper;
    csv << to_string(param) << ',' << format_number(r.value) << ','
        << format_number(d.T_cl) << ',' << format_number(p.T_cl) << ','
        << format_number(d.T_rev) << ',' << format_number(p.T_rev) << ','
        << format_number(d.T_sr) << ',' << format_number(p.T_sr) << ','
        << opt_number(r.report.T_cl_lab) << ',' << opt_number(r.T_cl_measured)
        << ',' << opt_number(r.T_rev_measured) << '\n';
  }
  auto f = open_output(ctx, "sweep.csv");
  f << csv.str();
  *ctx.out << csv.str();
  return kExitOk;
}

int cmd_selfcheck(const Context& ctx, double beta_scale) {
  const auto result = run_selfcheck(ctx.config, beta_scale);
  {
    auto f = open_output(ctx, "selfcheck.csv");
    write_selfcheck_csv(f, result, ctx.config.hash());
  }
  int oracles = 0, failed = 0, findings = 0;
  for (const auto& r : result.rows) {
    if (r.kind == "oracle") {
      ++oracles;
      if (r.status != "pass") {
        ++failed;
        *ctx.out << "FAIL " << r.name << "  value " << format_number(r.value)
                 << "  reference " << format_number(r.reference) << "  "
                 << r.status << '\n';
      }
    } else if (r.status == "discrepancy") {
      ++findings;
    }
  }
  *ctx.out << oracles - failed << '/' << oracles << " oracle checks passed, "
           << findings << " printed-formula discrepancies reported\n";
  return failed == 0 ? kExitOk : kExitFailure;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Wave packet revival times under periodic modulation", "revival"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = ".", mode, convention, jacobian;
  bool svg = false, rwa = false;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--svg", svg, "Also write an SVG plot of |A(t)|^2");
  app.add_option("--mode", mode, "definition | paper | both");
  app.add_option("--convention", convention, "paperq | stdq");
  app.add_option("--jacobian", jacobian, "as_printed | strict");
  app.add_flag("--rwa", rwa, "Integrate the rotating-wave system");

  auto* times = app.add_subcommand("times", "Predicted time scales");
  auto* mathieu = app.add_subcommand("mathieu", "Series vs matrix characteristic values");
  std::vector<double> nus{1.7, 2.5, 3.3}, qs{0.05, 0.1, 0.2};
  mathieu->add_option("--nu", nus, "Floquet exponents")->delimiter(',');
  mathieu->add_option("--q", qs, "Mathieu q values")->delimiter(',');

  auto* evolve_cmd = app.add_subcommand("evolve", "Integrate the packet, write trace.csv");

  auto* analyze = app.add_subcommand("analyze", "Measure time scales from traces");
  std::vector<std::string> trace_files;
  analyze->add_option("traces", trace_files, "Trace CSV files")->required();

  auto* sweep = app.add_subcommand("sweep", "Time scales over a parameter grid");
  std::string param_name, grid_spec;
  bool measure = false;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  sweep->add_option("--param", param_name, "lambda | hbar_eff | delta_n")->required();
  sweep->add_option("--grid", grid_spec, "v1,v2,... or lo:hi:count")->required();
  sweep->add_flag("--measure", measure, "Also evolve and measure each point");
  sweep->add_option("--threads", threads, "Worker threads");

  auto* selfcheck = app.add_subcommand("selfcheck", "Run every oracle and the formula ledger");
  double beta_scale = 1.0;
  selfcheck->add_option("--mutate-beta", beta_scale)->group("");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitFailure;
  }

  try {
    Context ctx;
    ctx.out = &out;
    ctx.err = &err;
    ctx.out_dir = out_dir;
    if (!config_path.empty()) ctx.config = load_config(config_path);
    if (!mode.empty()) ctx.config.report.mode = parse_mode(mode);
    if (!convention.empty()) ctx.config.report.convention = parse_convention(convention);
    if (!jacobian.empty()) ctx.config.report.jacobian = parse_jacobian(jacobian);
    if (svg) ctx.config.svg = true;
    if (rwa) ctx.config.evolution.rwa = true;

    if (*times) return cmd_times(ctx);
    if (*mathieu) return cmd_mathieu(ctx, nus, qs);
    if (*evolve_cmd) return cmd_evolve(ctx);
    if (*analyze) return cmd_analyze(ctx, trace_files);
    if (*sweep) {
      return cmd_sweep(ctx, parse_sweep_param(param_name), parse_grid(grid_spec),
                       measure, threads);
    }
    if (*selfcheck) return cmd_selfcheck(ctx, beta_scale);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const IntegrationAccuracyError& e) {
    err << "error: " << e.what() << " (suggested dt "
        << format_number(e.suggested_dt()) << ")\n";
    return kExitAccuracy;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitAccuracy;
  } catch (const AnalysisInputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitAnalysisInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace revival::cli
