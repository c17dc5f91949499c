#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hjmm/girsanov.hpp"
#include "hjmm/report.hpp"
#include "hjmm/simulate.hpp"
#include "hjmm/stats.hpp"

namespace hjmm {

/// Rebuilds the same model on a grid with the given step (same z_max), used
/// by tests that compare two time resolutions.
using ModelFactory = std::function<ModelSpec(double dz)>;

/// Discounted zero-coupon bond prices D_t for several maturities, streamed
/// along paths:  D_t = exp(-dt sum_{i<k} X_i(0) - trapz_{[0, T*-t]} X_t),
/// (left-rule short-rate integral, trapezoid maturity integral, t = k dt).
class BondMonitorCollector : public Collector {
 public:
  BondMonitorCollector(const ModelSpec& spec, const SimConfig& cfg,
                       std::vector<double> maturities, std::size_t n_monitors);
  /// Monitor at the given step numbers (ascending, within the horizon).
  BondMonitorCollector(const ModelSpec& spec, const SimConfig& cfg,
                       std::vector<double> maturities, std::vector<std::size_t> monitor_steps);

  std::unique_ptr<PathObserver> make_observer(std::size_t path_index) override;

  const std::vector<double>& monitor_times() const { return times_; }
  const std::vector<std::size_t>& monitor_steps() const { return monitor_steps_; }
  const std::vector<double>& maturities() const { return maturities_; }
  /// D value of one path at (maturity index, monitor index).
  double value(std::size_t path, std::size_t mat, std::size_t mon) const {
    return values_[(path * maturities_.size() + mat) * times_.size() + mon];
  }
  Estimate estimate(std::size_t mat, std::size_t mon) const;
  std::size_t n_excluded() const;
  std::vector<char> valid;

 private:
  friend class BondObserver;
  const ModelSpec* spec_;
  std::vector<double> maturities_;
  std::vector<std::size_t> monitor_steps_;
  std::vector<double> times_;
  std::vector<std::size_t> mat_steps_;  // maturity as a number of grid cells
  std::vector<double> values_;
  double dz_ = 0.0;
};

/// D_0 computed deterministically from the initial curve.
double initial_discounted_bond(const ModelSpec& spec, double maturity);

/// Discounted bond series of one densely recorded path (record_stride == 1);
/// bitwise-identical to the streaming collector at matching times.
std::vector<double> discounted_bond_series(const ModelSpec& spec, const SimResult& res,
                                           std::size_t path, double maturity);

struct BondTestOptions {
  std::size_t n_monitors = 8;
  std::size_t calibration_paths = 0;  // > 0: run a dt/2 ensemble to calibrate the bias allowance
  double c_override = -1.0;           // >= 0: use this C directly (no calibration run)
};

struct BondTestResult {
  double maturity = 0.0;
  double d0 = 0.0;
  std::vector<double> times;
  std::vector<Estimate> estimates;
  double allowance_c = 0.0;  // per-time pass rule: |Ê[D_t] - D_0| <= 3 SE + C dt
  double max_dev_se = 0.0;   // max_t |Ê - D_0| / SE, for reporting
  bool passed = true;
  std::size_t n_excluded = 0;
};

/// Risk-neutral martingale check of D_t across maturities.  With
/// calibration_paths > 0 the factory is rerun at dt/2 and
/// C = 2 max |Ê_dt - Ê_{dt/2}| / dt.
std::vector<BondTestResult> martingale_test(const ModelFactory& factory, const SimConfig& cfg,
                                            std::span<const double> maturities,
                                            const BondTestOptions& opts = {});

struct DriftDetectionResult {
  double maturity = 0.0;
  Estimate slope;  // mean per-path regression slope of D_t on t
  double t_stat = 0.0;
};

/// Real-world run priced without reweighting: the per-path OLS slope of D_t
/// over the monitor times (t=0 anchored at the deterministic D_0) estimates
/// the spurious drift; |t| > 3 flags it as statistically detected.
DriftDetectionResult drift_detection(const ModelSpec& spec, const SimConfig& cfg, double maturity,
                                     std::size_t n_monitors = 8);

struct PositivityProbe {
  double t = 0.0;
  double z = 0.0;
  Estimate negative_fraction;
};

struct PositivityResult {
  double fraction_negative = 0.0;  // over all (path, step, grid point) samples
  long long n_samples = 0;
  double worst_value = 0.0;
  bool passed = true;  // fraction <= threshold
  double threshold = 0.0;
  std::vector<PositivityProbe> probes;
  std::size_t n_excluded = 0;
};

/// Scan all curve values along the ensemble for negatives; optional probes
/// report the per-(t, z) negative fraction with a standard error.
PositivityResult positivity_test(const ModelSpec& spec, const SimConfig& cfg, double threshold,
                                 std::span<const std::pair<double, double>> probes = {});

struct MildProbe {
  double t = 0.0;
  double z = 0.0;
};

struct MildResidualResult {
  std::vector<MildProbe> probes;
  // Ê[X_t(z) - sum of left-rule shifted integrals] - h0(z+t); all integrands
  // (drift, diffusion, jumps, compensator) are sampled at maturity z + t - s.
  std::vector<Estimate> residuals;
  double max_abs = 0.0;
  double max_se = 0.0;
};

/// Monte Carlo check of the mild (variation-of-constants) form of the
/// dynamics; the residual carries the scheme's O(dt) quadrature bias and must
/// shrink at first order under dt refinement.  Sampling the stochastic terms
/// at the shifted maturity too cancels their fluctuation to O(dz), so small
/// ensembles resolve the bias.
MildResidualResult mild_residual(const ModelSpec& spec, const SimConfig& cfg,
                                 std::span<const MildProbe> probes);

struct GirsanovOptions {
  std::vector<int> stop_levels{2, 5};
  double ess_floor_fraction = 0.01;  // inconclusive below this fraction of valid paths
  double dt_allowance_coeff = 0.5;   // functional tolerance: 3 SE + coeff * dt * (1 + |q|)
  std::uint64_t q_seed_salt = 0x9e3779b97f4a7c15ULL;
};

struct FunctionalAgreement {
  std::string name;
  Estimate reweighted_p;  // (1/N) sum Z g under the real-world run
  Estimate direct_q;
  double diff_se_units = 0.0;
  bool ok = true;
};

struct GirsanovReport {
  Estimate z_mean;
  bool z_ok = true;
  std::vector<FunctionalAgreement> functionals;
  struct Stopped {
    int level;
    Estimate z_mean;
    double fraction_stopped;
    bool ok;
  };
  std::vector<Stopped> stopped;
  double ess = 0.0;
  double ess_floor = 0.0;
  double min_z = 1.0;
  std::size_t n_p = 0, n_q = 0, excluded_p = 0, excluded_q = 0;
  CheckOutcome outcome = CheckOutcome::passed;
};

/// Full measure-change consistency run: simulate under the real-world
/// measure, reweight by the density, compare against an independent
/// risk-neutral run; also checks E[Z_T] = 1 and the stopped variants.
GirsanovReport girsanov_consistency(const ModelSpec& spec, const SimConfig& cfg_real,
                                    const GirsanovOptions& opts = {});

}  // namespace hjmm
