#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace fdrcurve::cli {

/// One batch run. String fields hold the flag grammar unparsed so a run is
/// fully described by (command, flags); see README for the grammar.
struct RunConfig {
  std::string command;  // test | qstar | simulate | select-constraints | summarize
  std::string constraints;        // "theta:q[,theta:q...]"
  std::string family = "gaussian";  // gaussian | scaled:S | logistic | tabulated:PATH[:monotone]
  long m = 0;                     // hypothesis count when no data file sets it
  std::string grid;               // "start:stop:count"; default spans the jumps
  std::optional<std::uint64_t> seed;
  std::string mode;               // effect-size | snr
  std::string input;              // expression matrix path
  std::string stats;              // gene summary CSV path (summarize output)
  std::string groups;             // inline labels "A,A,B,B"
  std::string groups_file;        // two-column sample,label file
  std::string thetas;             // "VALUE[xCOUNT],..." for simulate
  std::string sigmas;             // "VALUE[xCOUNT],..." per-hypothesis scales
  long replications = 20000;
  std::string out = "fdrcurve_run";  // output path prefix
  unsigned threads = 0;
  bool flip_sign = false;  // keep raw B-A orientation instead of negating
  std::string method = "minimal";  // select-constraints: minimal | greedy
  std::string expected_rejections;  // optional "N" or "LO-HI" manifest check
};

/// Executes a validated run; writes the command's artifact files under
/// config.out. Returns 0 on success, 2 on validation errors, 3 on data
/// errors.
int run(const RunConfig& config);

/// Full command line entry: flags, optional --config JSON file (flags
/// override file values), FDRCURVE_SEED fallback.
int run_main(int argc, const char* const* argv);

}  // namespace fdrcurve::cli
