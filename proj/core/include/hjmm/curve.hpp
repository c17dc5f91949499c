#pragma once

#include <span>
#include <vector>

#include "hjmm/grid.hpp"

namespace hjmm {

/// Piecewise-linear forward curve sampled on a maturity grid, understood as
/// flat beyond the last grid point.  `beta` is the exponential weight of the
/// ambient Hilbert space: ||h||^2 = h(0)^2 + int_0^inf h'(z)^2 e^{beta z} dz.
/// Because the extension is flat, the tail contributes nothing to the norm and
/// every such curve lies in the space for any beta.
///
/// `tail_zero` marks curves promised to vanish at (and hence beyond) z_max,
/// i.e. members of the "vanishing at infinity" subspace used for coefficient
/// fields.  The flag is advisory; `check_tail_zero` verifies it.
struct ForwardCurve {
  GridPtr grid;
  double beta = 0.0;
  std::vector<double> values;
  bool tail_zero = false;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  /// Piecewise-linear evaluation; flat extension beyond z_max.
  double operator()(double z) const;

  /// Short rate h(0).
  double short_rate() const { return values.front(); }

  void ensure_valid() const;  // grid set, sizes match, finite values
};

/// Curve of constant value c (tail_zero only when c == 0).
ForwardCurve constant_curve(const GridPtr& grid, double beta, double c);

/// Sample a scalar function on the grid.  `clamp_tail` forces the last value
/// to 0 so the flat extension agrees with a field that must vanish at z_max.
template <class F>
ForwardCurve sample_curve(const GridPtr& grid, double beta, F&& f, bool clamp_tail = false) {
  ForwardCurve h;
  h.grid = grid;
  h.beta = beta;
  h.values.resize(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) h.values[i] = f(grid->point(i));
  if (clamp_tail) {
    h.values.back() = 0.0;
    h.tail_zero = true;
  }
  return h;
}

/// Cached cell weights for the beta-weighted seminorm on a fixed grid, used in
/// hot loops (per-step norm tracking, inner products).  For values v on the
/// grid: ||v||^2 = v[0]^2 + sum_k (dv_k)^2 * u_k with
/// u_k = (e^{beta z_{k+1}} - e^{beta z_k}) / (beta * (z_{k+1} - z_k)^2),
/// which is the exact integral of e^{beta z} over the cell divided by dz^2
/// (the piecewise-linear derivative is constant per cell).  beta = 0 uses the
/// limit (z_{k+1} - z_k) for the cell integral.
class BetaMetric {
 public:
  BetaMetric(GridPtr grid, double beta);

  double beta() const { return beta_; }
  const GridPtr& grid() const { return grid_; }

  double norm_sq(std::span<const double> v) const;
  double norm(std::span<const double> v) const;
  double inner(std::span<const double> a, std::span<const double> b) const;

  double norm(const ForwardCurve& h) const;
  double inner(const ForwardCurve& a, const ForwardCurve& b) const;

  /// Weight u_k for cell k (exposed for fused simulator loops).
  std::span<const double> cell_weights() const { return u_; }

 private:
  GridPtr grid_;
  double beta_;
  std::vector<double> u_;
};

/// One-off norm/inner-product helpers (build a BetaMetric internally; fine for
/// tests and cold paths, too slow for per-step use).
double norm_beta(const ForwardCurve& h);
double inner_beta(const ForwardCurve& a, const ForwardCurve& b);

/// Left shift (S_t h)(z) = h(z + t) by a whole number of grid steps; curves
/// are flat beyond z_max, so shifted-in tail values repeat the last point.
/// Exact for piecewise-linear curves: no interpolation is performed.
ForwardCurve shift(const ForwardCurve& h, double t);

/// Forward-difference derivative dh/dz (last point gets the same slope as the
/// previous cell so sizes match; for tail-flat curves the true value is 0 and
/// callers relying on that should use tail-clamped output, see d_dz_clamped).
ForwardCurve d_dz(const ForwardCurve& h);
ForwardCurve d_dz_clamped(const ForwardCurve& h);  // last value forced to 0

/// Antiderivative z -> int_0^z h(s) ds, exact for piecewise-linear h
/// (trapezoid rule is exact per cell).
ForwardCurve antiderivative(const ForwardCurve& h);

/// In-place a += c * b (grids and betas must match).
void add_scaled(ForwardCurve& a, double c, const ForwardCurve& b);
ForwardCurve operator+(const ForwardCurve& a, const ForwardCurve& b);
ForwardCurve operator-(const ForwardCurve& a, const ForwardCurve& b);
ForwardCurve operator*(double c, const ForwardCurve& h);

/// Throws StructuralError unless a and b share grid and beta.
void require_compatible(const ForwardCurve& a, const ForwardCurve& b);

/// True if values.back() is exactly 0 when tail_zero is set.
bool check_tail_zero(const ForwardCurve& h);

}  // namespace hjmm
