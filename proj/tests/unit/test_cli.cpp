#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "selfcheck.hpp"
#include "revival/analysis.hpp"
#include "revival/fingerprint.hpp"
#include "revival/oracle/oracles.hpp"
#include "revival/propagate.hpp"

namespace fs = std::filesystem;
using namespace revival;
using namespace revival::cli;
using doctest::Approx;
using nlohmann::json;

namespace {

const std::string kFixtures = REVIVAL_FIXTURE_DIR;
const std::string kGolden = REVIVAL_GOLDEN_DIR;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() /
             ("revival_test_cli_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

fs::path write_config(const fs::path& dir, const json& doc) {
  auto p = dir / "config.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

bool update_golden() {
  const char* v = std::getenv("REVIVAL_UPDATE_GOLDEN");
  return v != nullptr && std::string(v) == "1";
}

// Column of a CSV (comment lines skipped), by header name.
std::vector<std::string> column(const std::string& csv, const std::string& name) {
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> header, values;
  int idx = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (idx < 0) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == name) idx = static_cast<int>(i);
      }
      REQUIRE(idx >= 0);
      continue;
    }
    values.push_back(cells.at(idx));
  }
  return values;
}

}  // namespace

TEST_CASE("config parsing is strict") {
  CHECK_NOTHROW(parse_config(json::object()));
  CHECK_THROWS_AS(parse_config(json{{"spectra", json::object()}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"spectrum", {{"kind", "box"}, {"hbar", 0.1}}}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"spectrum", {{"kind", "harmonic"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"spectrum", {{"hbar_eff", "small"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"evolution", {{"t_max", 10}, {"periods", 2}}}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"evolution", {{"dt", -0.1}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"report", {{"mode", "all"}}}}), ConfigError);

  auto cfg = parse_config(json{{"evolution", {{"periods", 3}}},
                               {"resonance", {{"N", 2}}}});
  CHECK(cfg.evolution.t_max == Approx(3.0 * 2.0 * 2.0 * std::numbers::pi));
}

TEST_CASE("config survives a JSON round trip with the same hash") {
  auto cfg = load_config(fixture("driven_box.json"));
  auto again = parse_config(cfg.to_json());
  CHECK(again.canonical() == cfg.canonical());
  CHECK(again.hash() == cfg.hash());

  auto other = parse_config(json{{"resonance", {{"lambda", 0.051}}}});
  CHECK(other.hash() != parse_config(json{{"resonance", {{"lambda", 0.05}}}}).hash());
}

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == kExitFailure);
  CHECK(run({"bogus"}).code == kExitFailure);
  CHECK(run({"--config", "/nonexistent/config.json", "times"}).code == kExitFailure);
}

TEST_CASE("times golden file") {
  auto dir = scratch("times");
  auto r = run({"--config", fixture("box_undriven.json"), "--out", dir.string(),
                "--mode", "both", "times"});
  REQUIRE(r.code == kExitOk);
  const auto text = slurp(dir / "times.json");
  const auto golden_path = fs::path(kGolden) / "times_box.json";
  if (update_golden()) std::ofstream(golden_path, std::ios::binary) << text;

  const auto got = json::parse(text);
  const auto want = json::parse(slurp(golden_path));
  REQUIRE(got.size() == want.size());
  std::function<void(const json&, const json&, const std::string&)> same =
      [&](const json& a, const json& b, const std::string& path) {
        CAPTURE(path);
        if (a.is_number() && b.is_number()) {
          const double x = a.get<double>(), y = b.get<double>();
          CHECK(std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)));
        } else if (a.is_structured()) {
          REQUIRE(a.size() == b.size());
          for (auto it = b.begin(); it != b.end(); ++it) {
            if (b.is_object()) {
              REQUIRE(a.contains(it.key()));
              same(a.at(it.key()), it.value(), path + "." + it.key());
            }
          }
          if (b.is_array()) {
            for (std::size_t i = 0; i < b.size(); ++i) {
              same(a[i], b[i], path + "[" + std::to_string(i) + "]");
            }
          }
        } else {
          CHECK(a == b);
        }
      };
  same(got, want, "");

  CHECK(got.contains("definition"));
  CHECK(got.contains("paper"));
  CHECK(got.contains("discrepancy"));
  CHECK(r.out.find("T_cl_lab") != std::string::npos);
}

TEST_CASE("q = 0 renders the printed super-revival time as inf") {
  auto dir = scratch("qzero");
  auto r = run({"--config", fixture("box_undriven.json"), "--out", dir.string(), "times"});
  REQUIRE(r.code == kExitOk);
  const auto j = json::parse(slurp(dir / "times.json"));
  CHECK(j["q_used"].get<double>() == 0.0);
  CHECK(j["paper"]["T_sr"] == "inf");
}

TEST_CASE("nu_r = 1 is rejected as a domain error") {
  auto dir = scratch("nu1");
  auto cfg = json::parse(slurp(fixture("sweep_box.json")));
  cfg["packet"]["center"] = 2.5;  // r = 2, N = 1
  auto path = write_config(dir, cfg);
  auto r = run({"--config", path.string(), "--out", dir.string(), "times"});
  CHECK(r.code == kExitDomain);
  CHECK(r.err.find("non-resonant") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "times.json"));
}

TEST_CASE("mathieu command tabulates series and matrix values") {
  auto dir = scratch("mathieu");
  auto r = run({"--out", dir.string(), "mathieu", "--nu", "1.7,2.5", "--q", "0.1,0.2"});
  REQUIRE(r.code == kExitOk);
  const auto csv = slurp(dir / "mathieu.csv");
  CHECK(first_line(csv).rfind("# revival 0.1.0 config=", 0) == 0);
  const auto gaps = column(csv, "gap");
  REQUIRE(gaps.size() == 4);
  for (const auto& g : gaps) CHECK(std::abs(std::stod(g)) < 1e-3);
  CHECK(run({"--out", dir.string(), "mathieu", "--nu", "1", "--q", "0.1"}).code == kExitDomain);
}

TEST_CASE("evolve stamps the config hash and matches a recomputation") {
  auto dir = scratch("evolve");
  auto r = run({"--config", fixture("box_undriven.json"), "--out", dir.string(),
                "--svg", "evolve"});
  REQUIRE(r.code == kExitOk);
  auto cfg = load_config(fixture("box_undriven.json"));
  cfg.svg = true;
  const auto header = first_line(slurp(dir / "trace.csv"));
  CHECK(header == provenance_line(cfg.hash()));

  const auto svg = slurp(dir / "trace.svg");
  CHECK(first_line(svg) == "<!-- " + provenance_line(cfg.hash()).substr(2) + " -->");
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("href") == std::string::npos);
}

TEST_CASE("undriven run revives at the analytic time") {
  auto dir = scratch("revive");
  const double t_star = 4.0 / (std::numbers::pi * 0.05);
  auto cfg = json::parse(slurp(fixture("box_undriven.json")));
  cfg["evolution"]["t_max"] = t_star;
  cfg["evolution"]["dt"] = t_star / 2000.0;
  auto path = write_config(dir, cfg);
  auto r = run({"--config", path.string(), "--out", dir.string(), "evolve"});
  REQUIRE(r.code == kExitOk);
  std::ifstream in(dir / "trace.csv");
  auto trace = read_trace_csv(in);
  REQUIRE(trace.times.back() == Approx(t_star).epsilon(1e-12));
  CHECK(trace.abs2(trace.size() - 1) >= 1.0 - 1e-6);
}

TEST_CASE("--rwa keeps the trace schema") {
  auto dir = scratch("rwa");
  auto cfg = json::parse(slurp(fixture("driven_box.json")));
  cfg["evolution"]["periods"] = 2;
  auto path = write_config(dir, cfg);
  fs::create_directories(dir / "full");
  fs::create_directories(dir / "rwa");
  REQUIRE(run({"--config", path.string(), "--out", (dir / "full").string(), "evolve"}).code == kExitOk);
  REQUIRE(run({"--config", path.string(), "--out", (dir / "rwa").string(), "--rwa", "evolve"}).code ==
          kExitOk);
  auto header = [](const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] != '#') return line;
    }
    return std::string();
  };
  const auto full = slurp(dir / "full" / "trace.csv");
  const auto rwa = slurp(dir / "rwa" / "trace.csv");
  CHECK(header(full) == header(rwa));
  CHECK(column(full, "t") == column(rwa, "t"));
  CHECK(first_line(full) != first_line(rwa));  // rwa is part of the config

  cfg["coupling"] = {{"mode", "box_position"}};
  path = write_config(dir, cfg);
  CHECK(run({"--config", path.string(), "--out", dir.string(), "--rwa", "evolve"}).code ==
        kExitDomain);
}

TEST_CASE("integration failures exit 3 with a suggested step") {
  auto dir = scratch("accuracy");
  auto cfg = json::parse(slurp(fixture("driven_box.json")));
  cfg.erase("window");
  cfg["evolution"]["periods"] = 2;
  auto path = write_config(dir, cfg);
  auto r = run({"--config", path.string(), "--out", dir.string(), "evolve"});
  CHECK(r.code == kExitAccuracy);
  CHECK(r.err.find("suggested dt") != std::string::npos);
}

TEST_CASE("analyze recovers a synthetic two-frequency trace") {
  auto dir = scratch("synthetic");
  AutocorrTrace tr;
  const std::complex<double> I{0.0, 1.0};
  for (int i = 0; i <= 100000; ++i) {
    const double t = 0.01 * i;
    tr.times.push_back(t);
    tr.values.push_back(0.25 * (1.0 + std::exp(-I * t)) * (1.0 + std::exp(-I * 0.01 * t)));
    tr.norm_drift.push_back(0.0);
  }
  {
    std::ofstream f(dir / "two.csv");
    write_trace_csv(f, tr, 0);
  }
  auto r = run({"--config", fixture("box_undriven.json"), "--out", dir.string(), "analyze",
                (dir / "two.csv").string()});
  REQUIRE(r.code == kExitOk);
  std::ifstream in(dir / "two.csv");
  auto rep = measure_timescales(read_trace_csv(in));
  REQUIRE(rep.T_cl_measured);
  REQUIRE(rep.T_rev_measured);
  CHECK(*rep.T_cl_measured == Approx(2.0 * std::numbers::pi).epsilon(0.01));
  CHECK(*rep.T_rev_measured == Approx(200.0 * std::numbers::pi).epsilon(0.01));

  const auto measured = column(slurp(dir / "two.report.csv"), "measured");
  REQUIRE_FALSE(measured.empty());
  const auto peaks = slurp(dir / "two.peaks.csv");
  CHECK(peaks.find("\nt,abs_A2\n") != std::string::npos);
}

TEST_CASE("analyze rejects empty and malformed traces with exit 4") {
  auto dir = scratch("empty");
  {
    std::ofstream f(dir / "empty.csv");
    f << "# revival 0.1.0 config=0000000000000000\nt,re_A,im_A,abs_A2,norm_drift\n";
  }
  auto r = run({"--out", dir.string(), "analyze", (dir / "empty.csv").string()});
  CHECK(r.code == kExitAnalysisInput);
  CHECK_FALSE(r.err.empty());
  CHECK(run({"--out", dir.string(), "analyze", (dir / "missing.csv").string()}).code ==
        kExitAnalysisInput);
}

TEST_CASE("end-to-end box fixture populates every comparison row") {
  auto dir = scratch("e2e");
  REQUIRE(run({"--config", fixture("box_undriven.json"), "--out", dir.string(), "evolve"}).code ==
          kExitOk);
  REQUIRE(run({"--config", fixture("box_undriven.json"), "--out", dir.string(), "analyze",
               (dir / "trace.csv").string()})
              .code == kExitOk);
  const auto report = slurp(dir / "trace.report.csv");
  const auto scales = column(report, "scale");
  const auto modes = column(report, "mode");
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < scales.size(); ++i) rows.push_back(scales[i] + "/" + modes[i]);
  const std::vector<std::string> expected{"T_cl/definition", "T_cl_lab/definition",
                                          "T_rev/definition", "T_cl/paper", "T_rev/paper"};
  CHECK(rows == expected);
  for (const auto& m : column(report, "measured")) CHECK(std::isfinite(std::stod(m)));
  CHECK(report.find("# omitted T_sr definition") != std::string::npos);

  // The measured times are the box values, 2 / (pi hbar n) and 4 / (pi hbar).
  const auto measured = column(report, "measured");
  CHECK(std::stod(measured[0]) == Approx(2.0 / (std::numbers::pi * 0.05 * 20)).epsilon(0.01));
  CHECK(std::stod(measured[2]) == Approx(4.0 / (std::numbers::pi * 0.05)).epsilon(0.001));
}

TEST_CASE("sweep: grid order, duplicates and the super-revival slope") {
  auto dir = scratch("sweep");
  auto r = run({"--config", fixture("sweep_box.json"), "--out", dir.string(), "sweep",
                "--param", "lambda", "--grid", "0.02:0.2:7", "--threads", "3"});
  REQUIRE(r.code == kExitOk);
  const auto csv = slurp(dir / "sweep.csv");
  const auto values = column(csv, "value");
  const auto t_sr = column(csv, "T_sr_def");
  REQUIRE(values.size() == 7);
  for (std::size_t i = 1; i < values.size(); ++i) {
    CHECK(std::stod(values[i]) > std::stod(values[i - 1]));
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < values.size(); ++i) {
    x.push_back(std::stod(values[i]));
    y.push_back(std::stod(t_sr[i]));
  }
  CHECK(oracle::loglog_slope(x, y) == Approx(-2.0).epsilon(0.05));

  auto single = run({"--config", fixture("sweep_box.json"), "--out", dir.string(), "sweep",
                     "--param", "lambda", "--grid", "0.05"});
  REQUIRE(single.code == kExitOk);
  const auto one = slurp(dir / "sweep.csv");
  REQUIRE(run({"--config", fixture("sweep_box.json"), "--out", dir.string(), "times"}).code ==
          kExitOk);
  const auto times = json::parse(slurp(dir / "times.json"));
  auto num = [](const json& v) {
    return v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>();
  };
  CHECK(std::stod(column(one, "T_cl_def")[0]) == num(times["definition"]["T_cl"]));
  CHECK(std::stod(column(one, "T_rev_paper")[0]) == num(times["paper"]["T_rev"]));
  CHECK(std::stod(column(one, "T_sr_def")[0]) == num(times["definition"]["T_sr"]));
  CHECK(std::stod(column(one, "T_cl_lab")[0]) == num(times["T_cl_lab"]));

  auto dup = run({"--config", fixture("sweep_box.json"), "--out", dir.string(), "sweep",
                  "--param", "lambda", "--grid", "0.05,0.1,0.05"});
  REQUIRE(dup.code == kExitOk);
  CHECK(dup.err.find("warning: duplicate grid value 0.050000000000000003 ignored") !=
        std::string::npos);
  CHECK(column(slurp(dir / "sweep.csv"), "value").size() == 2);
}

TEST_CASE("sweep output does not depend on the thread count") {
  auto dir = scratch("threads");
  std::string a, b;
  for (const char* threads : {"1", "4"}) {
    REQUIRE(run({"--config", fixture("sweep_box.json"), "--out", dir.string(), "sweep",
                 "--param", "hbar_eff", "--grid", "0.03,0.04,0.05,0.06", "--threads", threads})
                .code == kExitOk);
    (a.empty() ? a : b) = slurp(dir / "sweep.csv");
  }
  CHECK(a == b);
}

TEST_CASE("printed-formula ledger golden file") {
  std::ostringstream out;
  write_ledger(out, discrepancy_ledger(), 12);
  const auto golden_path = fs::path(kGolden) / "ledger.csv";
  if (update_golden()) std::ofstream(golden_path, std::ios::binary) << out.str();
  CHECK(out.str() == slurp(golden_path));
}

TEST_CASE("selfcheck passes and a corrupted beta is caught") {
  auto dir = scratch("selfcheck");
  auto ok = run({"--config", fixture("box_undriven.json"), "--out", dir.string(), "selfcheck"});
  CHECK(ok.code == kExitOk);
  const auto csv = slurp(dir / "selfcheck.csv");
  CHECK(csv.find(",discrepancy\n") != std::string::npos);
  CHECK(csv.find(",fail\n") == std::string::npos);

  auto bad = run({"--config", fixture("box_undriven.json"), "--out", dir.string(), "selfcheck",
                  "--mutate-beta", "1.01"});
  CHECK(bad.code == kExitFailure);
  CHECK(bad.out.find("FAIL canonical_beta_ridders") != std::string::npos);
}

TEST_CASE("identical configs give byte-identical outputs") {
  auto a = scratch("det_a");
  auto b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    REQUIRE(run({"--config", fixture("box_undriven.json"), "--out", dir.string(), "--svg",
                 "evolve"}).code == kExitOk);
    REQUIRE(run({"--config", fixture("box_undriven.json"), "--out", dir.string(), "analyze",
                 (dir / "trace.csv").string()}).code == kExitOk);
    REQUIRE(run({"--config", fixture("box_undriven.json"), "--out", dir.string(), "times"})
                .code == kExitOk);
  }
  for (const char* name : {"trace.csv", "trace.svg", "trace.report.csv", "trace.peaks.csv",
                           "times.json"}) {
    CAPTURE(name);
    CHECK(slurp(a / name) == slurp(b / name));
    CHECK_FALSE(slurp(a / name).empty());
  }
}
