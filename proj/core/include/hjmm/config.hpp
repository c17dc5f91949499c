#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hjmm/checks.hpp"
#include "hjmm/diagnostics.hpp"
#include "hjmm/simulate.hpp"
#include "hjmm/zoo.hpp"

namespace hjmm {

/// One experiment = one config file.  Every field has a default, so a minimal
/// file only names what it changes; the resolved config (defaults filled in,
/// command-line overrides applied) is echoed verbatim into every output.
struct ExperimentConfig {
  // model section
  ModelParams model;
  double z_max = 10.0;
  double beta = 0.5;
  double beta_prime = 1.0;
  std::vector<double> cov_eigenvalues{1.0};
  MarkMcSettings mark_mc;

  // simulation section (sim.dt is also the maturity grid step: the transport
  // half-step is an exact index shift)
  SimConfig sim;

  // check section
  DeclaredBounds bounds;
  CheckSettings check;
  std::string phi_kind = "zero";  // "zero" | "linear": e^{phi}, phi = coeff * |x|
  double phi_coeff = 0.0;
  std::size_t check_pairs = 64;
  std::size_t check_samples = 64;

  // diagnostics section
  std::vector<double> maturities{1.0};
  std::size_t n_monitors = 8;
  std::uint64_t calibration_paths = 0;
  double positivity_threshold = 1e-3;
  std::vector<std::pair<double, double>> positivity_probes;  // (t, z)
  std::vector<int> girsanov_levels{2, 5};
  double ess_floor_fraction = 0.01;
  double dt_allowance_coeff = 0.5;

  // output section
  std::string out_dir = "out";
  bool terminal_curves = false;
  std::size_t jump_log_paths = 0;

  /// Cross-field consistency (dt divides horizon and z_max, maturities fit
  /// the grid, ...).  Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parse a JSON config.  Unknown keys and type mismatches raise ConfigError
/// with the full field path (e.g. "simulation.dt").  `source` names the file
/// in messages.
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_experiment_config(const std::string& path);

/// Resolved config as canonical JSON (sorted keys, all defaults
/// materialized): parsing the echo reproduces the config exactly.
std::string canonical_config_json(const ExperimentConfig& cfg);

/// Assemble the model / derived settings a run needs.
ModelSpec model_from_config(const ExperimentConfig& cfg);
/// Same model rebuilt with a different grid step (dt-refinement runs).
ModelSpec model_from_config_at(const ExperimentConfig& cfg, double dz);
CheckSettings check_settings_from_config(const ExperimentConfig& cfg);

}  // namespace hjmm
