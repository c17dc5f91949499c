#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hjmm/curve.hpp"
#include "hjmm/drivers.hpp"

namespace hjmm {

/// Volatility field.  column(h, j, out) writes the j-th *unscaled* column
/// c_j(h) on the grid; the factor loading is a_j = sqrt(lambda_j) c_j with
/// lambda_j from the covariance spec (the driving increments carry the
/// lambda_j scaling, see brownian_increments).  Columns must vanish at z_max
/// (tail-flat extension of a vanishing field).
struct VolField {
  int factors = 1;
  bool state_dependent = true;
  std::function<void(const ForwardCurve& h, int j, std::vector<double>& out)> column;
};

/// Jump field gamma(h, x) paired with its mark measure.  d_gamma is the
/// maturity derivative of the field (needed only by alpha_and_derivative).
struct JumpField {
  MarkMeasure measure;
  bool state_dependent = true;
  std::function<void(const ForwardCurve& h, std::span<const double> mark, std::vector<double>& out)> gamma;
  std::function<void(const ForwardCurve& h, std::span<const double> mark, std::vector<double>& out)> d_gamma;

  bool has_jumps() const { return measure.total_mass > 0.0; }
  bool has_d_gamma() const { return static_cast<bool>(d_gamma); }
};

/// Market price of risk: a curve field zeta(h) (diffusive component) and a
/// jump intensity ratio Y(h, jump_curve) > 0 relating real-world and
/// risk-neutral jump dynamics.
struct MprData {
  bool zeta_state_dependent = false;
  std::function<void(const ForwardCurve& h, std::vector<double>& out)> zeta;
  std::function<double(const ForwardCurve& h, const ForwardCurve& jump_curve)> y;
  bool y_is_constant = true;
  double y_constant = 1.0;

  double eval_y(const ForwardCurve& h, const ForwardCurve& jump_curve) const {
    return y_is_constant ? y_constant : y(h, jump_curve);
  }
};

/// Drift coefficient field b(h).
struct DriftField {
  bool state_dependent = true;
  std::function<void(const ForwardCurve& h, std::vector<double>& out)> eval;
};

/// Full model: grid, weights, diffusion/jump coefficients under both
/// measures, market price of risk, real-world drift, initial curve.
/// The risk-neutral drift is always the no-arbitrage drift (hjm_drift_xi).
struct ModelSpec {
  GridPtr grid;
  double beta = 0.5;        // weight of the state space
  double beta_prime = 1.0;  // larger weight used for jump-field estimates
  CovarianceSpec cov;
  VolField vol;
  JumpField rn_jumps;    // (gamma', F'): risk-neutral jump data
  JumpField real_jumps;  // (gamma, F): real-world jump data
  MprData mpr;
  DriftField real_drift;
  ForwardCurve h0;
  MarkMcSettings mark_mc;
  std::string fingerprint;

  void validate() const;
  ForwardCurve blank(double beta_override = -1.0) const;  // zero curve on the grid
};

/// Curve-valued estimate: value plus the largest pointwise standard error
/// (nonzero only when a sampler-based mark measure was integrated).
struct CurveEstimate {
  ForwardCurve value;
  double max_abs_se = 0.0;
  double max_rel_se = 0.0;  // relative to the sup of |value|
};

/// No-arbitrage (risk-neutral) drift:
///   xi(h) = sum_j lambda_j c_j(h) * Int c_j(h)
///           - int gamma'(h,x) * (e^{-Gamma'(h,x)} - 1) F'(dx),
/// where Int is the running integral from 0 and Gamma' = Int gamma'.
/// All products are pointwise in maturity.  Exact for atomic measures; for
/// sampler measures the _est variant reports the Monte Carlo standard error
/// and the plain variant throws AccuracyError when the relative error
/// exceeds spec.mark_mc.rel_tol.
CurveEstimate hjm_drift_xi_est(const ModelSpec& spec, const ForwardCurve& h);
ForwardCurve hjm_drift_xi(const ModelSpec& spec, const ForwardCurve& h);

/// aa* applied to a curve: sum_j lambda_j <c_j(h), w> c_j(h).
ForwardCurve apply_aastar(const ModelSpec& spec, const ForwardCurve& h, const ForwardCurve& w);

/// Scaled risk-price loadings theta_j = sqrt(lambda_j) <c_j(h), zeta(h)>.
std::vector<double> mpr_theta(const ModelSpec& spec, const ForwardCurve& h);

/// Classical diffusion-only real-world drift: sum_j lambda_j c_j Int c_j
/// minus aa* zeta.  Agrees with drift_from_mpre exactly when there are no
/// jumps.
ForwardCurve classical_real_drift(const ModelSpec& spec, const ForwardCurve& h);

/// Real-world drift implied by the market-price-of-risk equation:
///   b(h) = xi(h) - a(h)a(h)* zeta(h) - int gamma(h,y) (Y(h,gamma(h,y)) - 1) F(dy).
/// Returns a field closure over copies of the model's coefficient data.
DriftField drift_from_mpre(const ModelSpec& spec);

/// Norm of the market-price-of-risk equation residual at h:
///   || xi(h) - b(h) - aa* zeta(h) - int gamma (Y - 1) dF ||_beta.
double mpre_residual(const ModelSpec& spec, const ForwardCurve& h);

/// Jump-measure change-of-variables residual: for bounded g,
///   int g(gamma(h,y)) Y(h, gamma(h,y)) F(dy)  =  int g(gamma'(h,y)) F'(dy).
/// Returns max_k |residual_k| over the supplied test functions together with
/// the combined Monte Carlo standard error (0 for atomic measures).
struct IdentityResult {
  std::vector<double> residuals;
  double max_abs = 0.0;
  double max_se = 0.0;
};
using CurveFunctional = std::function<double(const ForwardCurve&)>;
IdentityResult measure_identity_residual(const ModelSpec& spec, const ForwardCurve& h,
                                         std::span<const CurveFunctional> tests);

/// Default bounded test family for the identity above: exponentials of the
/// beta'-norm at several scales plus smoothed radial indicators around
/// reference_scale.
std::vector<CurveFunctional> default_mark_test_functions(const GridPtr& grid, double beta_prime,
                                                         double reference_scale);

/// alpha(h) = - int gamma'(h,x) (e^{-Gamma'(h,x)} - 1) F'(dx)  (the jump part
/// of xi) and its maturity derivative
///   D alpha(h) = int [gamma'^2 e^{-Gamma'} - D gamma' (e^{-Gamma'} - 1)] F'(dx).
/// Requires the jump field to provide d_gamma.
std::pair<ForwardCurve, ForwardCurve> alpha_and_derivative(const ModelSpec& spec,
                                                           const ForwardCurve& h);

/// Check  |Gamma'(h,x)(z)| <= phi(x) + tol  for sampled curves h, all marks
/// of the quadrature and all grid points.  Returns the worst margin
/// max(|Gamma| - phi) (<= tol means the bound holds) and a witness.  The
/// tolerance absorbs quadrature round-off when phi is tight.
struct GammaBoundResult {
  bool holds = true;
  double worst_margin = -1e300;
  ForwardCurve witness_h;
  std::vector<double> witness_mark;
  double witness_z = 0.0;
};
GammaBoundResult gamma_antiderivative_bound(const ModelSpec& spec,
                                            const std::function<double(std::span<const double>)>& phi,
                                            std::span<const ForwardCurve> sample_curves,
                                            double tol = 1e-9);

}  // namespace hjmm
