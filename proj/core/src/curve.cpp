#include "hjmm/curve.hpp"

#include <algorithm>
#include <cmath>

#include "hjmm/errors.hpp"

namespace hjmm {

double ForwardCurve::operator()(double z) const {
  const auto& p = grid->points();
  if (z <= 0.0) return values.front();
  if (z >= p.back()) return values.back();
  std::size_t k;
  if (grid->is_uniform()) {
    const double dz = grid->uniform_step();
    k = static_cast<std::size_t>(z / dz);
    if (k >= p.size() - 1) k = p.size() - 2;
  } else {
    k = static_cast<std::size_t>(std::upper_bound(p.begin(), p.end(), z) - p.begin()) - 1;
  }
  const double w = (z - p[k]) / (p[k + 1] - p[k]);
  return values[k] + w * (values[k + 1] - values[k]);
}

void ForwardCurve::ensure_valid() const {
  if (!grid) throw StructuralError("curve has no grid");
  if (values.size() != grid->size()) throw StructuralError("curve/grid size mismatch");
  for (double v : values)
    if (!std::isfinite(v)) throw StructuralError("curve has non-finite values");
}

ForwardCurve constant_curve(const GridPtr& grid, double beta, double c) {
  ForwardCurve h;
  h.grid = grid;
  h.beta = beta;
  h.values.assign(grid->size(), c);
  h.tail_zero = (c == 0.0);
  return h;
}

BetaMetric::BetaMetric(GridPtr grid, double beta) : grid_(std::move(grid)), beta_(beta) {
  if (!grid_) throw StructuralError("BetaMetric needs a grid");
  if (!(beta_ >= 0.0) || !std::isfinite(beta_)) throw StructuralError("beta must be >= 0 and finite");
  const auto& p = grid_->points();
  u_.resize(p.size() - 1);
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    const double dz = p[k + 1] - p[k];
    // Exact integral of e^{beta z} over the cell.
    double cell;
    if (beta_ == 0.0) {
      cell = dz;
    } else {
      // expm1 keeps precision when beta*dz is tiny.
      cell = std::exp(beta_ * p[k]) * std::expm1(beta_ * dz) / beta_;
    }
    u_[k] = cell / (dz * dz);
  }
}

double BetaMetric::norm_sq(std::span<const double> v) const {
  if (v.size() != grid_->size()) throw StructuralError("value/grid size mismatch");
  double acc = v[0] * v[0];
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    const double dv = v[k + 1] - v[k];
    acc += dv * dv * u_[k];
  }
  return acc;
}

double BetaMetric::norm(std::span<const double> v) const { return std::sqrt(norm_sq(v)); }

double BetaMetric::inner(std::span<const double> a, std::span<const double> b) const {
  if (a.size() != grid_->size() || b.size() != grid_->size())
    throw StructuralError("value/grid size mismatch");
  double acc = a[0] * b[0];
  for (std::size_t k = 0; k + 1 < a.size(); ++k)
    acc += (a[k + 1] - a[k]) * (b[k + 1] - b[k]) * u_[k];
  return acc;
}

double BetaMetric::norm(const ForwardCurve& h) const {
  if (!same_grid(h.grid, grid_) || h.beta != beta_)
    throw StructuralError("curve does not match metric grid/beta");
  return norm(std::span<const double>(h.values));
}

double BetaMetric::inner(const ForwardCurve& a, const ForwardCurve& b) const {
  require_compatible(a, b);
  if (!same_grid(a.grid, grid_) || a.beta != beta_)
    throw StructuralError("curve does not match metric grid/beta");
  return inner(std::span<const double>(a.values), std::span<const double>(b.values));
}

double norm_beta(const ForwardCurve& h) {
  h.ensure_valid();
  return BetaMetric(h.grid, h.beta).norm(h);
}

double inner_beta(const ForwardCurve& a, const ForwardCurve& b) {
  require_compatible(a, b);
  return BetaMetric(a.grid, a.beta).inner(a, b);
}

ForwardCurve shift(const ForwardCurve& h, double t) {
  const std::size_t n = h.grid->steps_for(t);
  ForwardCurve out = h;
  const std::size_t m = h.values.size();
  for (std::size_t i = 0; i < m; ++i) out.values[i] = h.values[std::min(i + n, m - 1)];
  // Shifting preserves the flat tail; a vanishing tail stays vanishing.
  return out;
}

ForwardCurve d_dz(const ForwardCurve& h) {
  ForwardCurve out = h;
  const auto& p = h.grid->points();
  const std::size_t m = h.values.size();
  for (std::size_t i = 0; i + 1 < m; ++i)
    out.values[i] = (h.values[i + 1] - h.values[i]) / (p[i + 1] - p[i]);
  out.values[m - 1] = out.values[m - 2];
  out.tail_zero = false;
  return out;
}

ForwardCurve d_dz_clamped(const ForwardCurve& h) {
  ForwardCurve out = d_dz(h);
  out.values.back() = 0.0;
  out.tail_zero = true;
  return out;
}

ForwardCurve antiderivative(const ForwardCurve& h) {
  ForwardCurve out = h;
  const auto& p = h.grid->points();
  double acc = 0.0;
  out.values[0] = 0.0;
  for (std::size_t i = 0; i + 1 < h.values.size(); ++i) {
    acc += 0.5 * (h.values[i] + h.values[i + 1]) * (p[i + 1] - p[i]);
    out.values[i + 1] = acc;
  }
  out.tail_zero = false;
  return out;
}

void add_scaled(ForwardCurve& a, double c, const ForwardCurve& b) {
  require_compatible(a, b);
  for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] += c * b.values[i];
  a.tail_zero = a.tail_zero && b.tail_zero;
}

ForwardCurve operator+(const ForwardCurve& a, const ForwardCurve& b) {
  ForwardCurve out = a;
  add_scaled(out, 1.0, b);
  return out;
}

ForwardCurve operator-(const ForwardCurve& a, const ForwardCurve& b) {
  ForwardCurve out = a;
  add_scaled(out, -1.0, b);
  return out;
}

ForwardCurve operator*(double c, const ForwardCurve& h) {
  ForwardCurve out = h;
  for (auto& v : out.values) v *= c;
  return out;
}

void require_compatible(const ForwardCurve& a, const ForwardCurve& b) {
  if (!same_grid(a.grid, b.grid)) throw StructuralError("curves live on different grids");
  if (a.beta != b.beta) throw StructuralError("curves have different beta weights");
  if (a.values.size() != b.values.size()) throw StructuralError("curve size mismatch");
}

bool check_tail_zero(const ForwardCurve& h) {
  return !h.tail_zero || h.values.back() == 0.0;
}

}  // namespace hjmm
