#pragma once

#include <functional>

#include "hjmm/model.hpp"
#include "hjmm/report.hpp"

namespace hjmm {

/// Knobs shared by the coefficient audits.  All sampling is keyed by
/// (seed, sample index), so estimates are reproducible and grow monotonically
/// when more samples are added.
struct CheckSettings {
  std::uint64_t seed = 20240915;
  double radius = 2.0;          // beta-ball the curves are drawn from
  double positivity_tol = 1e-6; // grid tolerance; use ~1e-10 for exact-factor fields
  double identity_tol = 1e-12;  // change-of-variables identity (plus MC error)
  double mpre_tol = 1e-10;      // market-price-of-risk equation residual
  double identity_scale = 0.02; // reference scale of the identity test functions
  double fd_step_rel = 1e-4;    // directional finite-difference step (relative)
  std::size_t mark_nodes = 512; // cap on quadrature nodes for sampler measures
  // Mark-space weight e^{phi(x)} in the jump integrals; null means phi = 0.
  std::function<double(std::span<const double>)> phi;
};

/// Deterministic curves in the beta-ball:
///   h = c_0 + sum_{m=1..10} c_m (1 - e^{-m z}),
/// coefficients uniform in ranges scaled so the curve stays inside the ball.
/// Every draw is a pure function of (seed, index).
class BallCurveSampler {
 public:
  BallCurveSampler(GridPtr grid, double beta, double radius, std::uint64_t seed);

  ForwardCurve sample(std::uint64_t index) const;
  /// Pointwise clamp to >= 0 (stays in the ball: clamping is 1-Lipschitz).
  ForwardCurve sample_nonneg(std::uint64_t index) const;

  struct BoundarySample {
    ForwardCurve h;          // nonnegative, h(z_k) = 0 at the sampled node
    std::size_t zero_index;  // k
  };
  BoundarySample sample_boundary(std::uint64_t index) const;

 private:
  GridPtr grid_;
  double beta_;
  double radius_;
  std::uint64_t seed_;
  std::vector<std::vector<double>> shapes_;  // the 11 basis curves on the grid
  std::vector<double> coeff_range_;          // per-shape coefficient bound
};

// ---------------------------------------------------------------------------
// Replayable predicates.  The check_* drivers below take their sup over these
// exact functions, so a witness index reproduces the reported value bitwise.
// Pair indices cycle through three strategies: independent draws, scaled
// pairs along a ray, and small perturbations.

/// [diffusion Lipschitz + jump-field Lipschitz integral] / curve distance:
///   ( sqrt(sum_j lambda_j ||c_j(h)-c_j(k)||^2_beta)
///     + sqrt(int e^{phi} ||g'(h,x)-g'(k,x)||^2_{beta'} dF') ) / ||h-k||_beta.
/// Returns NaN for a degenerate pair (h == k).
double lipschitz_rn_ratio(const ModelSpec& spec, const CheckSettings& st,
                          std::uint64_t pair_index);

/// ||a(h)|| + int e^{phi} max(||g'(h,x)||^2, ||g'(h,x)||^4) dF'.
double growth_rn_value(const ModelSpec& spec, const CheckSettings& st,
                       std::uint64_t sample_index);

/// Same shape as lipschitz_rn_ratio with the real-world data (b, a, gamma, F);
/// the drift term ||b(h)-b(k)||_beta is included.
double lipschitz_real_ratio(const ModelSpec& spec, const CheckSettings& st,
                            std::uint64_t pair_index);

/// |s(h) - s(k)| / ||h-k||_beta for s(h) = sum_j lambda_j <D_v c_j(h), c_j(h)>_beta,
/// D_v the central finite difference along the pair direction with Richardson
/// step halving.  *converged reports whether the two steps agreed.
double vol_smoothness_ratio(const ModelSpec& spec, const CheckSettings& st,
                            std::uint64_t pair_index, bool* converged = nullptr);

struct PositivityMargins {
  double min_margin = 0.0;       // min over marks/maturities of (h + g'(h,x))(z)
  double margin_z = 0.0;         // maturity attaining it
  double margin_mark = 0.0;      // first coordinate of the mark attaining it
  double boundary_field = 0.0;   // max over marks of |g'(h0,x)(s)| at h0(s) = 0
  double boundary_vol = 0.0;     // max_j |a_j(h0)(s)| at the same node
  double boundary_z = 0.0;       // the boundary maturity s
};
PositivityMargins positivity_margins(const ModelSpec& spec, const CheckSettings& st,
                                     std::uint64_t sample_index);

// ---------------------------------------------------------------------------
// Audit drivers.  Falsifiers, not provers: "passed" means no violation found
// at this sampling effort.

CheckItem check_lipschitz_rn(const ModelSpec& spec, double l_declared, std::size_t n_pairs,
                             const CheckSettings& st = {});
CheckItem check_growth_rn(const ModelSpec& spec, double l_declared, std::size_t n_samples,
                          const CheckSettings& st = {});
CheckItem check_lipschitz_real(const ModelSpec& spec, double l_declared, std::size_t n_pairs,
                               const CheckSettings& st = {});
CheckItem check_vol_smoothness(const ModelSpec& spec, std::size_t n_samples,
                               const CheckSettings& st = {});
CheckItem check_positivity_conditions(const ModelSpec& spec, std::size_t n_samples,
                                      const CheckSettings& st = {});

/// Jump-measure change-of-variables identity audit over sampled curves
/// (bounded test functions; exact for atomic measures).
CheckItem check_measure_identity(const ModelSpec& spec, std::size_t n_samples,
                                 const CheckSettings& st = {});

/// Market-price-of-risk equation residual over sampled curves, plus
/// boundedness of the risk-price loadings sum_j theta_j^2 and of
/// int (1 - sqrt(Y))^2 dF.
CheckItem check_drift_condition(const ModelSpec& spec, std::size_t n_samples,
                                const CheckSettings& st = {});

struct DeclaredBounds {
  double lipschitz_rn = 1.0;
  double growth_rn = 1.0;
  double lipschitz_real = 1.0;
};

CheckReport run_all_checks(const ModelSpec& spec, const DeclaredBounds& bounds,
                           std::size_t n_pairs, std::size_t n_samples,
                           const CheckSettings& st = {});

}  // namespace hjmm
