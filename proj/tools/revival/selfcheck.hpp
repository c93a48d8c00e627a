#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace revival::cli {

struct CheckRow {
  std::string kind;  // oracle | discrepancy
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double rel_diff = 0.0;
  double tolerance = 0.0;  // oracle rows only
  std::string status;      // pass | fail | agrees | discrepancy
};

struct SelfcheckResult {
  std::vector<CheckRow> rows;

  bool all_pass() const;
};

/// Printed closed forms against the values obtained from the definitions, at
/// the fixed reference point nu = 2.5, q = 0.1, beta = 1, hbar = 1, N = 1.
/// Discrepancies are findings, not failures.
std::vector<CheckRow> discrepancy_ledger();

/// Runs every oracle on the configured spectrum plus the ledger.
/// beta_scale != 1 corrupts the canonical beta before the checks run.
SelfcheckResult run_selfcheck(const RunConfig& config, double beta_scale = 1.0);

void write_selfcheck_csv(std::ostream& out, const SelfcheckResult& result,
                         std::uint64_t config_hash);

/// Ledger rows alone at the given significant digits (golden-file format).
void write_ledger(std::ostream& out, const std::vector<CheckRow>& rows,
                  int digits);

}  // namespace revival::cli
