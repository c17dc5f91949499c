#include "hjmm/model.hpp"

#include <cmath>
#include <cstdio>

#include "hjmm/errors.hpp"

namespace hjmm {

namespace {

// Running integral from 0 of piecewise-linear values (trapezoid, exact).
void antider_values(const CurveGrid& g, std::span<const double> v, std::vector<double>& out) {
  const auto& p = g.points();
  out.resize(v.size());
  double acc = 0.0;
  out[0] = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    acc += 0.5 * (v[i] + v[i + 1]) * (p[i + 1] - p[i]);
    out[i + 1] = acc;
  }
}

void zeta_values(const ModelSpec& spec, const ForwardCurve& h, std::vector<double>& out) {
  out.assign(spec.grid->size(), 0.0);
  if (spec.mpr.zeta) spec.mpr.zeta(h, out);
}

// Pointwise accumulator for curve-valued mark integrals.  Atomic measures
// accumulate exactly; sampler measures track per-point Welford statistics so
// the integral comes with a standard error.
class PointwiseQuadrature {
 public:
  PointwiseQuadrature(const MarkMeasure& m, std::size_t n_points)
      : atomic_(m.is_atomic() || m.total_mass == 0.0), mass_(m.total_mass) {
    sum_.assign(n_points, 0.0);
    if (!atomic_) {
      mean_.assign(n_points, 0.0);
      m2_.assign(n_points, 0.0);
    }
  }

  // Add one quadrature node: `term` holds the integrand values, `w` the node
  // weight (atom weight, or total_mass/n for sampler draws).
  void add(double w, std::span<const double> term) {
    if (atomic_) {
      for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += w * term[i];
    } else {
      ++n_;
      for (std::size_t i = 0; i < sum_.size(); ++i) {
        const double d = term[i] - mean_[i];
        mean_[i] += d / static_cast<double>(n_);
        m2_[i] += d * (term[i] - mean_[i]);
      }
    }
  }

  // out += sign * integral; returns the largest pointwise standard error.
  double add_to(std::span<double> out, double sign) {
    double max_se = 0.0;
    if (atomic_) {
      for (std::size_t i = 0; i < sum_.size(); ++i) out[i] += sign * sum_[i];
    } else if (n_ > 0) {
      for (std::size_t i = 0; i < sum_.size(); ++i) {
        out[i] += sign * mass_ * mean_[i];
        if (n_ > 1) {
          const double var = m2_[i] / static_cast<double>(n_ - 1);
          max_se = std::max(max_se, mass_ * std::sqrt(var / static_cast<double>(n_)));
        }
      }
    }
    return max_se;
  }

 private:
  bool atomic_;
  double mass_;
  long long n_ = 0;
  std::vector<double> sum_, mean_, m2_;
};

double sup_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

void ModelSpec::validate() const {
  if (!grid) throw StructuralError("model has no grid");
  if (!(beta >= 0.0)) throw DomainError("beta must be >= 0");
  if (!(beta_prime > beta)) throw DomainError("beta_prime must exceed beta");
  cov.validate();
  if (vol.factors != cov.dim()) throw StructuralError("vol factors != covariance dimension");
  if (!vol.column) throw StructuralError("model has no volatility field");
  rn_jumps.measure.validate();
  real_jumps.measure.validate();
  if (rn_jumps.has_jumps() && !rn_jumps.gamma) throw StructuralError("risk-neutral jump field missing gamma");
  if (real_jumps.has_jumps() && !real_jumps.gamma) throw StructuralError("real-world jump field missing gamma");
  h0.ensure_valid();
  if (!same_grid(h0.grid, grid) || h0.beta != beta) throw StructuralError("h0 does not live on the model grid");
  if (mpr.y_is_constant && !(mpr.y_constant > 0.0)) throw DomainError("jump intensity ratio Y must be positive");
}

ForwardCurve ModelSpec::blank(double beta_override) const {
  return constant_curve(grid, beta_override < 0 ? beta : beta_override, 0.0);
}

CurveEstimate hjm_drift_xi_est(const ModelSpec& spec, const ForwardCurve& h) {
  if (!same_grid(h.grid, spec.grid)) throw StructuralError("state curve not on model grid");
  const std::size_t m = spec.grid->size();
  CurveEstimate res;
  res.value.grid = spec.grid;
  res.value.beta = spec.beta;
  res.value.values.assign(m, 0.0);
  auto& out = res.value.values;

  std::vector<double> col, integ;
  for (int j = 0; j < spec.vol.factors; ++j) {
    spec.vol.column(h, j, col);
    if (col.size() != m) throw StructuralError("vol column size mismatch");
    antider_values(*spec.grid, col, integ);
    const double lj = spec.cov.eigenvalues[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < m; ++i) out[i] += lj * col[i] * integ[i];
  }

  if (spec.rn_jumps.has_jumps()) {
    PointwiseQuadrature quad(spec.rn_jumps.measure, m);
    std::vector<double> g, bigg, term(m);
    for_each_quadrature_mark(spec.rn_jumps.measure, spec.mark_mc,
                             [&](double w, std::span<const double> x) {
                               spec.rn_jumps.gamma(h, x, g);
                               antider_values(*spec.grid, g, bigg);
                               for (std::size_t i = 0; i < m; ++i)
                                 term[i] = g[i] * std::expm1(-bigg[i]);
                               quad.add(w, term);
                             });
    res.max_abs_se = quad.add_to(out, -1.0);
  }

  res.value.tail_zero = (out.back() == 0.0);
  res.max_rel_se = res.max_abs_se / std::max(sup_abs(out), 1e-300);
  return res;
}

ForwardCurve hjm_drift_xi(const ModelSpec& spec, const ForwardCurve& h) {
  auto est = hjm_drift_xi_est(spec, h);
  if (est.max_rel_se > spec.mark_mc.rel_tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "no-arbitrage drift: mark-integral relative standard error %.3g exceeds tolerance %.3g",
                  est.max_rel_se, spec.mark_mc.rel_tol);
    throw AccuracyError(buf);
  }
  return std::move(est.value);
}

ForwardCurve apply_aastar(const ModelSpec& spec, const ForwardCurve& h, const ForwardCurve& w) {
  if (!same_grid(w.grid, spec.grid) || w.beta != spec.beta)
    throw StructuralError("target curve not in the model state space");
  BetaMetric metric(spec.grid, spec.beta);
  const std::size_t m = spec.grid->size();
  ForwardCurve out = spec.blank();
  std::vector<double> col;
  for (int j = 0; j < spec.vol.factors; ++j) {
    spec.vol.column(h, j, col);
    const double s = spec.cov.eigenvalues[static_cast<std::size_t>(j)] *
                     metric.inner(col, std::span<const double>(w.values));
    for (std::size_t i = 0; i < m; ++i) out.values[i] += s * col[i];
  }
  out.tail_zero = (out.values.back() == 0.0);
  return out;
}

std::vector<double> mpr_theta(const ModelSpec& spec, const ForwardCurve& h) {
  BetaMetric metric(spec.grid, spec.beta);
  std::vector<double> zeta;
  zeta_values(spec, h, zeta);
  std::vector<double> col, theta(static_cast<std::size_t>(spec.vol.factors));
  for (int j = 0; j < spec.vol.factors; ++j) {
    spec.vol.column(h, j, col);
    theta[static_cast<std::size_t>(j)] =
        std::sqrt(spec.cov.eigenvalues[static_cast<std::size_t>(j)]) *
        metric.inner(col, zeta);
  }
  return theta;
}

ForwardCurve classical_real_drift(const ModelSpec& spec, const ForwardCurve& h) {
  const std::size_t m = spec.grid->size();
  ForwardCurve out = spec.blank();
  std::vector<double> col, integ;
  for (int j = 0; j < spec.vol.factors; ++j) {
    spec.vol.column(h, j, col);
    antider_values(*spec.grid, col, integ);
    const double lj = spec.cov.eigenvalues[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < m; ++i) out.values[i] += lj * col[i] * integ[i];
  }
  std::vector<double> zeta;
  zeta_values(spec, h, zeta);
  BetaMetric metric(spec.grid, spec.beta);
  for (int j = 0; j < spec.vol.factors; ++j) {
    spec.vol.column(h, j, col);
    const double s = spec.cov.eigenvalues[static_cast<std::size_t>(j)] * metric.inner(col, zeta);
    for (std::size_t i = 0; i < m; ++i) out.values[i] -= s * col[i];
  }
  out.tail_zero = (out.values.back() == 0.0);
  return out;
}

namespace {

// Shared by drift_from_mpre and mpre_residual:
// out = xi(h) - aa*zeta(h) - int gamma(h,y) (Y(h,gamma(h,y)) - 1) F(dy).
void mpre_drift_values(const ModelSpec& spec, const BetaMetric& metric, const ForwardCurve& h,
                       std::vector<double>& out) {
  const std::size_t m = spec.grid->size();
  auto xi = hjm_drift_xi(spec, h);
  out = std::move(xi.values);

  std::vector<double> zeta, col;
  zeta_values(spec, h, zeta);
  for (int j = 0; j < spec.vol.factors; ++j) {
    spec.vol.column(h, j, col);
    const double s = spec.cov.eigenvalues[static_cast<std::size_t>(j)] * metric.inner(col, zeta);
    for (std::size_t i = 0; i < m; ++i) out[i] -= s * col[i];
  }

  if (spec.real_jumps.has_jumps()) {
    PointwiseQuadrature quad(spec.real_jumps.measure, m);
    std::vector<double> g(m), term(m);
    ForwardCurve jump_curve;
    jump_curve.grid = spec.grid;
    jump_curve.beta = spec.beta_prime;
    for_each_quadrature_mark(spec.real_jumps.measure, spec.mark_mc,
                             [&](double w, std::span<const double> x) {
                               spec.real_jumps.gamma(h, x, g);
                               double y = 1.0;
                               if (!spec.mpr.y_is_constant) {
                                 jump_curve.values = g;
                                 y = spec.mpr.y(h, jump_curve);
                               } else {
                                 y = spec.mpr.y_constant;
                               }
                               if (!(y > 0.0)) throw DomainError("jump intensity ratio Y must be positive");
                               for (std::size_t i = 0; i < m; ++i) term[i] = g[i] * (y - 1.0);
                               quad.add(w, term);
                             });
    quad.add_to(out, -1.0);
  }
}

}  // namespace

DriftField drift_from_mpre(const ModelSpec& spec) {
  // Snapshot the coefficient data so the field survives the original spec.
  auto base = std::make_shared<ModelSpec>(spec);
  base->real_drift = {};
  auto metric = std::make_shared<BetaMetric>(spec.grid, spec.beta);
  DriftField field;
  field.state_dependent = spec.vol.state_dependent || spec.rn_jumps.state_dependent ||
                          spec.real_jumps.state_dependent || spec.mpr.zeta_state_dependent ||
                          !spec.mpr.y_is_constant;
  field.eval = [base, metric](const ForwardCurve& h, std::vector<double>& out) {
    mpre_drift_values(*base, *metric, h, out);
  };
  return field;
}

double mpre_residual(const ModelSpec& spec, const ForwardCurve& h) {
  if (!spec.real_drift.eval) throw StructuralError("model has no real-world drift field");
  BetaMetric metric(spec.grid, spec.beta);
  std::vector<double> rhs;
  mpre_drift_values(spec, metric, h, rhs);
  std::vector<double> b;
  spec.real_drift.eval(h, b);
  if (b.size() != rhs.size()) throw StructuralError("drift field size mismatch");
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= b[i];
  return metric.norm(std::span<const double>(rhs));
}

IdentityResult measure_identity_residual(const ModelSpec& spec, const ForwardCurve& h,
                                         std::span<const CurveFunctional> tests) {
  IdentityResult res;
  res.residuals.assign(tests.size(), 0.0);
  if (tests.empty()) return res;

  ForwardCurve jump_curve;
  jump_curve.grid = spec.grid;
  jump_curve.beta = spec.beta_prime;

  // Left side: int g(gamma(h,y)) Y(h, gamma(h,y)) F(dy), one MeanVar per test.
  std::vector<MeanVar> left(tests.size()), right(tests.size());
  std::vector<double> lsum(tests.size(), 0.0), rsum(tests.size(), 0.0);
  const bool left_atomic = spec.real_jumps.measure.is_atomic() || !spec.real_jumps.has_jumps();
  const bool right_atomic = spec.rn_jumps.measure.is_atomic() || !spec.rn_jumps.has_jumps();

  if (spec.real_jumps.has_jumps()) {
    std::vector<double> g;
    for_each_quadrature_mark(spec.real_jumps.measure, spec.mark_mc,
                             [&](double w, std::span<const double> x) {
                               spec.real_jumps.gamma(h, x, g);
                               jump_curve.values = g;
                               const double y = spec.mpr.eval_y(h, jump_curve);
                               if (!(y > 0.0)) throw DomainError("jump intensity ratio Y must be positive");
                               for (std::size_t k = 0; k < tests.size(); ++k) {
                                 const double v = tests[k](jump_curve) * y;
                                 if (left_atomic)
                                   lsum[k] += w * v;
                                 else
                                   left[k].add(v);
                               }
                             });
  }
  if (spec.rn_jumps.has_jumps()) {
    std::vector<double> g;
    for_each_quadrature_mark(spec.rn_jumps.measure, spec.mark_mc,
                             [&](double w, std::span<const double> x) {
                               spec.rn_jumps.gamma(h, x, g);
                               jump_curve.values = g;
                               for (std::size_t k = 0; k < tests.size(); ++k) {
                                 const double v = tests[k](jump_curve);
                                 if (right_atomic)
                                   rsum[k] += w * v;
                                 else
                                   right[k].add(v);
                               }
                             });
  }

  const double lmass = spec.real_jumps.measure.total_mass;
  const double rmass = spec.rn_jumps.measure.total_mass;
  for (std::size_t k = 0; k < tests.size(); ++k) {
    const double lv = left_atomic ? lsum[k] : lmass * left[k].mean;
    const double rv = right_atomic ? rsum[k] : rmass * right[k].mean;
    const double lse = left_atomic ? 0.0 : lmass * left[k].se();
    const double rse = right_atomic ? 0.0 : rmass * right[k].se();
    res.residuals[k] = lv - rv;
    res.max_abs = std::max(res.max_abs, std::abs(res.residuals[k]));
    res.max_se = std::max(res.max_se, std::sqrt(lse * lse + rse * rse));
  }
  return res;
}

std::vector<CurveFunctional> default_mark_test_functions(const GridPtr& grid, double beta_prime,
                                                         double reference_scale) {
  const double r = std::max(reference_scale, 1e-12);
  auto metric = std::make_shared<BetaMetric>(grid, beta_prime);
  std::vector<CurveFunctional> fns;
  fns.push_back([](const ForwardCurve&) { return 1.0; });
  for (double s : {1.0, 3.0, 9.0}) {
    fns.push_back([metric, s, r](const ForwardCurve& g) {
      return std::exp(-s * metric->norm(std::span<const double>(g.values)) / r);
    });
  }
  for (double c : {0.5, 1.0, 2.0}) {
    fns.push_back([metric, c, r](const ForwardCurve& g) {
      const double n = metric->norm(std::span<const double>(g.values));
      // Smoothed indicator of { ||g|| <= c r } with width 0.1 c r.
      return 1.0 / (1.0 + std::exp((n - c * r) / (0.1 * c * r)));
    });
  }
  return fns;
}

std::pair<ForwardCurve, ForwardCurve> alpha_and_derivative(const ModelSpec& spec,
                                                           const ForwardCurve& h) {
  if (!spec.rn_jumps.has_jumps()) {
    auto zero = spec.blank();
    zero.tail_zero = true;
    return {zero, zero};
  }
  if (!spec.rn_jumps.has_d_gamma())
    throw StructuralError("alpha derivative needs the jump field's maturity derivative");
  const std::size_t m = spec.grid->size();
  ForwardCurve alpha = spec.blank(), dalpha = spec.blank();
  PointwiseQuadrature qa(spec.rn_jumps.measure, m), qd(spec.rn_jumps.measure, m);
  std::vector<double> g, dg, bigg, ta(m), td(m);
  for_each_quadrature_mark(spec.rn_jumps.measure, spec.mark_mc,
                           [&](double w, std::span<const double> x) {
                             spec.rn_jumps.gamma(h, x, g);
                             spec.rn_jumps.d_gamma(h, x, dg);
                             antider_values(*spec.grid, g, bigg);
                             for (std::size_t i = 0; i < m; ++i) {
                               const double e = std::exp(-bigg[i]);
                               ta[i] = g[i] * (e - 1.0);
                               td[i] = g[i] * g[i] * e - dg[i] * (e - 1.0);
                             }
                             qa.add(w, ta);
                             qd.add(w, td);
                           });
  qa.add_to(alpha.values, -1.0);
  qd.add_to(dalpha.values, +1.0);
  alpha.tail_zero = (alpha.values.back() == 0.0);
  return {alpha, dalpha};
}

GammaBoundResult gamma_antiderivative_bound(const ModelSpec& spec,
                                            const std::function<double(std::span<const double>)>& phi,
                                            std::span<const ForwardCurve> sample_curves,
                                            double tol) {
  GammaBoundResult res;
  if (!spec.rn_jumps.has_jumps()) return res;
  std::vector<double> g, bigg;
  for (const auto& h : sample_curves) {
    for_each_quadrature_mark(spec.rn_jumps.measure, spec.mark_mc,
                             [&](double, std::span<const double> x) {
                               spec.rn_jumps.gamma(h, x, g);
                               antider_values(*spec.grid, g, bigg);
                               const double bound = phi(x);
                               for (std::size_t i = 0; i < bigg.size(); ++i) {
                                 const double margin = std::abs(bigg[i]) - bound;
                                 if (margin > res.worst_margin) {
                                   res.worst_margin = margin;
                                   res.witness_h = h;
                                   res.witness_mark.assign(x.begin(), x.end());
                                   res.witness_z = spec.grid->point(i);
                                 }
                               }
                             });
  }
  res.holds = (res.worst_margin <= tol);
  return res;
}

}  // namespace hjmm
