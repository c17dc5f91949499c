#pragma once

#include <string>

#include "hjmm/config.hpp"

namespace hjmm {

/// Process exit codes shared by the command-line driver.
namespace exit_code {
inline constexpr int ok = 0;        // everything ran and passed
inline constexpr int failure = 1;   // a test or check reported a violation
inline constexpr int config = 2;    // configuration / usage error
inline constexpr int blow_up = 3;   // blown-up path fraction above the limit
}  // namespace exit_code

/// Each runner writes its outputs under cfg.out_dir (config_echo.json, the
/// command's CSV/text artifacts, and a machine-readable run_summary.json)
/// and returns the exit code.  Outputs are written even on failure; wall
/// times never enter the files, so identical (config, seed) runs produce
/// byte-identical artifacts.

int run_simulate(const ExperimentConfig& cfg);
int run_check(const ExperimentConfig& cfg);
int run_martingale_test(const ExperimentConfig& cfg);
int run_girsanov_test(const ExperimentConfig& cfg);
int run_positivity_test(const ExperimentConfig& cfg);
/// check + simulate + the diagnostics in sequence; exit code is the most
/// severe of the individual codes.
int run_all(const ExperimentConfig& cfg);

}  // namespace hjmm
