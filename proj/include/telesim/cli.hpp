// Command execution behind the CLI: parameter parsing, the five run modes,
// and table / CSV / JSON rendering. The frontend binary only maps argv onto
// RunConfig and writes the result out.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace telesim {

struct RunConfig {
  enum class Mode { teleport, sweep, multi, session, oracle };
  enum class Format { table, csv, json };

  Mode mode = Mode::teleport;

  // Single-pair parameters (teleport, and session/oracle without banks).
  double b2 = 0.2;
  double bp2 = 0.5;

  // Multi-pair banks as (b^2, b'^2) per pair; when non-empty they take
  // precedence over b2/bp2.
  std::vector<std::pair<double, double>> banks;

  // "random:N", or comma-separated amplitudes "re:im,re:im,..." (":im"
  // optional); must supply 2^k values for k pairs.
  std::string input_spec = "random:1";

  std::uint64_t seed = 1;
  std::uint64_t trials = 100000;  // session mode
  int grid = 11;                  // sweep mode: points per axis on [0, 0.5]

  Format format = Format::table;
};

struct CommandResult {
  int exit_code = 0;        // 0 iff all internal crosschecks passed
  std::string output;       // rendered report (table, CSV, or JSON)
  std::string diagnostics;  // warnings and crosscheck summaries, for stderr
};

// Runs the configured command. Never throws for bad parameters; those come
// back as exit code 2 with a diagnostic.
CommandResult execute(const RunConfig& cfg);

}  // namespace telesim
