#ifndef BIFI_RUNNER_HPP
#define BIFI_RUNNER_HPP

#include <string>
#include <vector>

#include "config.hpp"

namespace bifi {

struct RunOutcome {
  std::string summary;  // human-readable per-command report
  std::vector<std::string> files_written;
  int selftest_failures = -1;  // >= 0 only for the selftest command

  // Profile data mirrored for in-process consumers (C API accessors).
  std::vector<double> x;
  std::vector<double> qoi;  // solve-hf / solve-lf result
  std::vector<double> mean_bf, std_bf, mean_ref, std_ref;
  double e_mean = 0.0, e_std = 0.0;
};

// Dispatches cfg.command and writes the report artifacts under cfg.out_dir.
RunOutcome execute(const RunConfig& cfg);

// Built-in example suite (exact values and derived oracles); returns the
// failure count and appends one line per check to report.
int selftest(std::string& report);

}  // namespace bifi

#endif  // BIFI_RUNNER_HPP
