#pragma once

#include <string>
#include <vector>

#include "hjmm/model.hpp"

namespace hjmm {

/// Volatility families:
///  - "ho_lee":                 c_j(z) = sigma_j * plateau-taper shape (state-free)
///  - "hull_white":             c_j(z) = sigma * e^{-kappa_j z}, kappa_j = kappa (j+1)
///  - "capped_proportional":    c_j(h) = sigma * min(||h||_beta, cap) * e^{-kappa_j z}
///  - "pointwise_proportional": c_j(h)(z) = sigma * h(z) * e^{-kappa_j z}
/// All columns are tail-clamped to 0 at z_max.
struct VolParams {
  std::string family = "hull_white";
  double sigma = 0.01;
  double kappa = 0.5;
  double cap = 10.0;      // capped_proportional only
  double plateau = 0.5;   // ho_lee: fraction of z_max held flat before the taper
};

/// Jump families (risk-neutral field gamma'):
///  - "none"
///  - "exp_jump":           gamma'(h,x)(z) = -x e^{-z}             (state-free)
///  - "pointwise_exp_jump": gamma'(h,x)(z) = -x clamp(h(z),0,1) e^{-z}
/// Marks: "point" (single atom at mark_size) or "trunc_exp" (exponential with
/// mean mark_size truncated at mark_cap, sampler-based).
struct JumpParams {
  std::string family = "none";
  double intensity = 0.0;  // risk-neutral intensity
  std::string marks = "point";
  double mark_size = 0.01;
  double mark_cap = 0.05;
};

/// Market price of risk: constant curve zeta and constant intensity ratio Y.
/// The real-world jump measure is F = F'/y_ratio with the same field.
struct MprParams {
  double zeta_level = 0.0;
  double y_ratio = 1.0;
};

struct ModelParams {
  VolParams vol;
  JumpParams jumps;
  MprParams mpr;
  std::string real_drift = "mpre";  // "mpre" | "classical"
  double h0_flat = 0.03;
  std::vector<double> h0_values;  // overrides h0_flat when nonempty
};

/// Assemble a full model on the given grid.  The real-world drift field is
/// cached eagerly when state-independent.
ModelSpec build_model(const ModelParams& params, GridPtr grid, double beta, double beta_prime,
                      CovarianceSpec cov, MarkMcSettings mark_mc = {});

/// Risk-neutral drift as a field (the simulator's drift under the pricing
/// measure); cached eagerly when state-independent.
DriftField risk_neutral_drift_field(const ModelSpec& spec);

/// Replace a state-independent field's closure by a precomputed curve.
DriftField cache_if_static(const DriftField& field, const ForwardCurve& h0);

}  // namespace hjmm
