#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace revival::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // usage, config, failed selfcheck
inline constexpr int kExitDomain = 2;
inline constexpr int kExitAccuracy = 3;
inline constexpr int kExitAnalysisInput = 4;

struct Context {
  RunConfig config;
  std::string out_dir = ".";
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

int cmd_times(const Context& ctx);
int cmd_mathieu(const Context& ctx, const std::vector<double>& nus,
                const std::vector<double>& qs);
int cmd_evolve(const Context& ctx);
int cmd_analyze(const Context& ctx, const std::vector<std::string>& traces);

enum class SweepParam { Lambda, HbarEff, DeltaN };
SweepParam parse_sweep_param(const std::string& s);
const char* to_string(SweepParam p);

/// Grid syntax: comma list ("0.02,0.05") or log-spaced "lo:hi:count".
std::vector<double> parse_grid(const std::string& spec);

int cmd_sweep(const Context& ctx, SweepParam param, std::vector<double> grid,
              bool measure, unsigned threads);
int cmd_selfcheck(const Context& ctx, double beta_scale);

/// Parses argv-style arguments (without the program name), runs the command
/// and maps errors to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace revival::cli
