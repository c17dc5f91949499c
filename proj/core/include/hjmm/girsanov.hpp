#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hjmm/simulate.hpp"
#include "hjmm/stats.hpp"

namespace hjmm {

/// Per-step log-density increments of the measure change dQ = Z_T dP
/// accumulated along real-world paths:
///   dlog Z = sum_j (<c_j, zeta> dW_j - 1/2 lambda_j <c_j, zeta>^2 dt)
///            + sum_{jumps} log Y - dt * int (Y - 1) dF,
/// all coefficients at the pre-step curve.  Each factor has conditional mean
/// one, so Z is an exact martingale of the discrete scheme: E[Z_t] = 1 and
/// E[Z_{tau land T}] = 1 hold without any time-step bias.
///
/// tau_n is the first grid time with ||X||_beta >= n, capped at min(n, T)
/// (the level doubles as a time cap).
class DensityCollector : public Collector {
 public:
  DensityCollector(const ModelSpec& spec, const SimConfig& cfg, std::vector<int> stop_levels,
                   std::size_t n_monitors = 8);

  std::unique_ptr<PathObserver> make_observer(std::size_t path_index) override;

  // Results, one slot per path (valid[p] == 0 for blown-up paths).
  std::vector<double> z_terminal;
  std::vector<double> log_z_monitors;  // [path][monitor], flattened
  std::vector<double> stopped_z;       // [path][level], Z at tau_level ∧ level ∧ T
  std::vector<char> stopped_early;     // [path][level], tau_level < T
  std::vector<double> min_z;           // per-path minimum of Z along the grid
  std::vector<char> valid;

  const std::vector<double>& monitor_times() const { return monitor_times_; }
  const std::vector<int>& stop_levels() const { return levels_; }

  Estimate z_mean() const;                    // over valid paths
  Estimate stopped_z_mean(std::size_t level_idx) const;
  double stopped_fraction(std::size_t level_idx) const;
  double ess() const;                         // effective sample size of Z weights
  std::size_t n_valid() const;

 private:
  friend class DensityObserver;
  const ModelSpec* spec_;
  SimConfig cfg_;
  std::vector<int> levels_;
  std::vector<std::size_t> monitor_steps_;
  std::vector<double> monitor_times_;
  std::shared_ptr<BetaMetric> metric_;
  // Fast paths for state-independent data.
  bool static_inner_ = false;
  std::vector<double> inner_static_;  // <c_j, zeta> per factor
  bool static_jump_comp_ = false;
  double jump_comp_static_ = 0.0;  // int (Y-1) dF
  std::vector<double> zeta_static_;
};

/// Replay the density along one path of an ensemble (bitwise equal to the
/// collector's records for that path).
struct DensityPath {
  std::vector<double> times;
  std::vector<double> log_z;  // log Z at every grid time, starting at t=0
  double z_terminal = 1.0;
  std::vector<double> stopped_z;
  std::vector<char> stopped_early;
  bool valid = true;
};
DensityPath density_along_path(const ModelSpec& spec, const SimConfig& cfg,
                               std::uint64_t path_index, std::vector<int> stop_levels);

/// (1/N) sum Z_i g_i with its standard error, over valid paths.
Estimate reweighted_mean(std::span<const double> z, std::span<const double> g,
                         std::span<const char> valid);

/// Named terminal functionals of the curve, evaluated at t = horizon:
/// short_rate = X_T(0); point_1y = X_T(1); bond_2y = exp(-int_0^2 X_T);
/// norm_sq = ||X_T||^2_beta; exp_neg_norm = exp(-||X_T||^2_beta).
/// Used by the measure-change consistency test.
class TerminalFunctionalCollector : public Collector {
 public:
  TerminalFunctionalCollector(const ModelSpec& spec, const SimConfig& cfg);

  std::unique_ptr<PathObserver> make_observer(std::size_t path_index) override;

  static const std::vector<std::string>& names();
  std::vector<double> values;  // [path][functional], flattened
  std::vector<char> valid;

  std::span<const double> of_path(std::size_t p) const {
    return {values.data() + p * names().size(), names().size()};
  }

 private:
  friend class TerminalFunctionalObserver;
  const ModelSpec* spec_;
  std::size_t n_steps_;
  std::shared_ptr<BetaMetric> metric_;
  std::size_t idx_1y_ = 0, idx_2y_ = 0;
};

}  // namespace hjmm
