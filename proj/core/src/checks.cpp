#include "hjmm/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hjmm/curve.hpp"
#include "hjmm/errors.hpp"
#include "hjmm/rng.hpp"

namespace hjmm {

namespace {

MarkMcSettings reduced_mc(const MarkMcSettings& mc, std::size_t cap) {
  MarkMcSettings out = mc;
  out.n_samples = std::min(out.n_samples, cap);
  return out;
}

double phi_weight(const CheckSettings& st, std::span<const double> x) {
  return st.phi ? std::exp(st.phi(x)) : 1.0;
}

// sqrt(sum_j lambda_j ||c_j(h) - c_j(k)||^2_beta); k null = plain norm of a(h).
double vol_hs_dist(const ModelSpec& spec, const BetaMetric& mb, const ForwardCurve& h,
                   const ForwardCurve* k) {
  std::vector<double> ch, ck, diff;
  double acc = 0.0;
  for (int j = 0; j < spec.vol.factors; ++j) {
    spec.vol.column(h, j, ch);
    if (k) {
      spec.vol.column(*k, j, ck);
      diff.resize(ch.size());
      for (std::size_t i = 0; i < ch.size(); ++i) diff[i] = ch[i] - ck[i];
      acc += spec.cov.eigenvalues[static_cast<std::size_t>(j)] * mb.norm_sq(diff);
    } else {
      acc += spec.cov.eigenvalues[static_cast<std::size_t>(j)] * mb.norm_sq(ch);
    }
  }
  return std::sqrt(acc);
}

// int e^{phi(x)} ||gamma(h,x) - gamma(k,x)||^2_{beta'} dF (k null: no difference).
double jump_lipschitz_integral(const JumpField& jf, const ModelSpec& spec,
                               const CheckSettings& st, const BetaMetric& mbp,
                               const ForwardCurve& h, const ForwardCurve* k) {
  if (!jf.has_jumps()) return 0.0;
  double acc = 0.0;
  std::vector<double> gh, gk, diff;
  for_each_quadrature_mark(jf.measure, reduced_mc(spec.mark_mc, st.mark_nodes),
                           [&](double w, std::span<const double> x) {
                             jf.gamma(h, x, gh);
                             const std::vector<double>* v = &gh;
                             if (k) {
                               jf.gamma(*k, x, gk);
                               diff.resize(gh.size());
                               for (std::size_t i = 0; i < gh.size(); ++i)
                                 diff[i] = gh[i] - gk[i];
                               v = &diff;
                             }
                             acc += w * phi_weight(st, x) * mbp.norm_sq(*v);
                           });
  return acc;
}

struct SamplePair {
  ForwardCurve h, k;
  double dist = 0.0;
};

// Pair strategies by index: 0 independent, 1 along a ray, 2 perturbation.
SamplePair make_pair(const BallCurveSampler& sampler, const BetaMetric& mb, double radius,
                     std::uint64_t i) {
  SamplePair p;
  p.h = sampler.sample(2 * i);
  switch (i % 3) {
    case 0:
      p.k = sampler.sample(2 * i + 1);
      break;
    case 1: {
      const double nh = std::sqrt(mb.norm_sq(p.h.values));
      p.k = p.h;
      if (nh > 0.0) {
        static constexpr double kFracs[] = {0.15, 0.35, 0.55, 0.75, 0.95};
        const double t = kFracs[(i / 3) % 5] * radius / nh;
        for (auto& v : p.k.values) v *= t;
      }
      break;
    }
    default: {  // h + eps (g - h): a convex combination, stays in the ball
      const ForwardCurve g = sampler.sample(2 * i + 1);
      const double eps = 1e-3 * (1.0 + static_cast<double>(i % 7));
      p.k = p.h;
      for (std::size_t q = 0; q < p.k.values.size(); ++q)
        p.k.values[q] += eps * (g.values[q] - p.h.values[q]);
      break;
    }
  }
  std::vector<double> diff(p.h.values.size());
  for (std::size_t q = 0; q < diff.size(); ++q) diff[q] = p.h.values[q] - p.k.values[q];
  p.dist = std::sqrt(mb.norm_sq(diff));
  return p;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Sampler

BallCurveSampler::BallCurveSampler(GridPtr grid, double beta, double radius, std::uint64_t seed)
    : grid_(std::move(grid)), beta_(beta), radius_(radius), seed_(seed) {
  if (!(radius > 0)) throw DomainError("sampler radius must be positive");
  const BetaMetric metric(grid_, beta_);
  const auto& pts = grid_->points();
  shapes_.resize(11);
  coeff_range_.resize(11);
  for (std::size_t m = 0; m < shapes_.size(); ++m) {
    auto& s = shapes_[m];
    s.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      s[i] = m == 0 ? 1.0 : 1.0 - std::exp(-static_cast<double>(m) * pts[i]);
    // Coefficients bounded by radius / (11 ||shape||): the triangle
    // inequality keeps every draw inside the ball.
    coeff_range_[m] = radius_ / (11.0 * std::sqrt(metric.norm_sq(s)));
  }
}

ForwardCurve BallCurveSampler::sample(std::uint64_t index) const {
  RandomSource rs(StreamKey{seed_, index, substream::sampler});
  ForwardCurve h;
  h.grid = grid_;
  h.beta = beta_;
  h.values.assign(grid_->size(), 0.0);
  h.tail_zero = false;
  for (std::size_t m = 0; m < shapes_.size(); ++m) {
    const double c = (2.0 * rs.uniform01() - 1.0) * coeff_range_[m];
    for (std::size_t i = 0; i < h.values.size(); ++i) h.values[i] += c * shapes_[m][i];
  }
  return h;
}

ForwardCurve BallCurveSampler::sample_nonneg(std::uint64_t index) const {
  ForwardCurve h = sample(index);
  for (auto& v : h.values) v = std::max(v, 0.0);
  return h;
}

BallCurveSampler::BoundarySample BallCurveSampler::sample_boundary(std::uint64_t index) const {
  RandomSource rs(StreamKey{seed_, index, substream::sampler});
  ForwardCurve h;
  h.grid = grid_;
  h.beta = beta_;
  h.values.assign(grid_->size(), 0.0);
  h.tail_zero = false;
  for (std::size_t m = 0; m < shapes_.size(); ++m) {
    const double c = (2.0 * rs.uniform01() - 1.0) * coeff_range_[m];
    for (std::size_t i = 0; i < h.values.size(); ++i) h.values[i] += c * shapes_[m][i];
  }
  for (auto& v : h.values) v = std::max(v, 0.0);
  auto k = static_cast<std::size_t>(rs.uniform01() * static_cast<double>(grid_->size()));
  if (k >= grid_->size()) k = grid_->size() - 1;
  h.values[k] = 0.0;
  // Zeroing a node can raise the derivative energy; rescale back into the
  // ball (preserves nonnegativity and the zero).
  const BetaMetric metric(grid_, beta_);
  const double n = std::sqrt(metric.norm_sq(h.values));
  if (n > radius_)
    for (auto& v : h.values) v *= radius_ / n;
  return {std::move(h), k};
}

// ---------------------------------------------------------------------------
// Predicates

double lipschitz_rn_ratio(const ModelSpec& spec, const CheckSettings& st,
                          std::uint64_t pair_index) {
  const BetaMetric mb(spec.grid, spec.beta);
  const BetaMetric mbp(spec.grid, spec.beta_prime);
  const BallCurveSampler sampler(spec.grid, spec.beta, st.radius, st.seed);
  const SamplePair p = make_pair(sampler, mb, st.radius, pair_index);
  if (p.dist == 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double vol = vol_hs_dist(spec, mb, p.h, &p.k);
  const double jump = std::sqrt(jump_lipschitz_integral(spec.rn_jumps, spec, st, mbp, p.h, &p.k));
  return (vol + jump) / p.dist;
}

double growth_rn_value(const ModelSpec& spec, const CheckSettings& st,
                       std::uint64_t sample_index) {
  const BetaMetric mb(spec.grid, spec.beta);
  const BetaMetric mbp(spec.grid, spec.beta_prime);
  const BallCurveSampler sampler(spec.grid, spec.beta, st.radius, st.seed);
  const ForwardCurve h = sampler.sample(sample_index);
  double value = vol_hs_dist(spec, mb, h, nullptr);
  if (spec.rn_jumps.has_jumps()) {
    double acc = 0.0;
    std::vector<double> g;
    for_each_quadrature_mark(spec.rn_jumps.measure, reduced_mc(spec.mark_mc, st.mark_nodes),
                             [&](double w, std::span<const double> x) {
                               spec.rn_jumps.gamma(h, x, g);
                               const double n2 = mbp.norm_sq(g);
                               acc += w * phi_weight(st, x) * std::max(n2, n2 * n2);
                             });
    value += acc;
  }
  return value;
}

double lipschitz_real_ratio(const ModelSpec& spec, const CheckSettings& st,
                            std::uint64_t pair_index) {
  if (!spec.real_drift.eval)
    throw StructuralError("real-world Lipschitz audit needs a drift field");
  const BetaMetric mb(spec.grid, spec.beta);
  const BetaMetric mbp(spec.grid, spec.beta_prime);
  const BallCurveSampler sampler(spec.grid, spec.beta, st.radius, st.seed);
  const SamplePair p = make_pair(sampler, mb, st.radius, pair_index);
  if (p.dist == 0.0) return std::numeric_limits<double>::quiet_NaN();

  std::vector<double> bh, bk;
  spec.real_drift.eval(p.h, bh);
  spec.real_drift.eval(p.k, bk);
  for (std::size_t i = 0; i < bh.size(); ++i) bh[i] -= bk[i];
  const double drift = std::sqrt(mb.norm_sq(bh));
  const double vol = vol_hs_dist(spec, mb, p.h, &p.k);
  const double jump =
      std::sqrt(jump_lipschitz_integral(spec.real_jumps, spec, st, mbp, p.h, &p.k));
  return (drift + vol + jump) / p.dist;
}

namespace {

// s(h) = sum_j lambda_j <D_v c_j(h), c_j(h)>_beta by central difference.
double dir_derivative_functional(const ModelSpec& spec, const BetaMetric& mb,
                                 const ForwardCurve& h, const ForwardCurve& v, double eps) {
  ForwardCurve hp = h, hm = h;
  for (std::size_t i = 0; i < h.values.size(); ++i) {
    hp.values[i] += eps * v.values[i];
    hm.values[i] -= eps * v.values[i];
  }
  double s = 0.0;
  std::vector<double> cp, cm, ch;
  for (int j = 0; j < spec.vol.factors; ++j) {
    spec.vol.column(hp, j, cp);
    spec.vol.column(hm, j, cm);
    spec.vol.column(h, j, ch);
    for (std::size_t i = 0; i < cp.size(); ++i) cp[i] = (cp[i] - cm[i]) / (2.0 * eps);
    s += spec.cov.eigenvalues[static_cast<std::size_t>(j)] * mb.inner(cp, ch);
  }
  return s;
}

// Richardson pair at eps and eps/2; flags disagreement.
double smooth_functional(const ModelSpec& spec, const BetaMetric& mb, const ForwardCurve& h,
                         const ForwardCurve& v, double eps, bool* ok) {
  const double s1 = dir_derivative_functional(spec, mb, h, v, eps);
  const double s2 = dir_derivative_functional(spec, mb, h, v, 0.5 * eps);
  const double scale = std::max({std::abs(s1), std::abs(s2), 1e-12});
  if (std::abs(s1 - s2) > 5e-3 * scale) *ok = false;
  return (4.0 * s2 - s1) / 3.0;
}

}  // namespace

double vol_smoothness_ratio(const ModelSpec& spec, const CheckSettings& st,
                            std::uint64_t pair_index, bool* converged) {
  const BetaMetric mb(spec.grid, spec.beta);
  const BallCurveSampler sampler(spec.grid, spec.beta, st.radius, st.seed);
  const SamplePair p = make_pair(sampler, mb, st.radius, pair_index);
  if (converged) *converged = true;
  if (p.dist == 0.0) return std::numeric_limits<double>::quiet_NaN();

  ForwardCurve dir = p.h;
  for (std::size_t i = 0; i < dir.values.size(); ++i)
    dir.values[i] = (p.k.values[i] - p.h.values[i]) / p.dist;

  bool ok = true;
  const double eps_h = st.fd_step_rel * std::max(1.0, std::sqrt(mb.norm_sq(p.h.values)));
  const double eps_k = st.fd_step_rel * std::max(1.0, std::sqrt(mb.norm_sq(p.k.values)));
  const double sh = smooth_functional(spec, mb, p.h, dir, eps_h, &ok);
  const double sk = smooth_functional(spec, mb, p.k, dir, eps_k, &ok);
  if (converged) *converged = ok;
  return std::abs(sh - sk) / p.dist;
}

PositivityMargins positivity_margins(const ModelSpec& spec, const CheckSettings& st,
                                     std::uint64_t sample_index) {
  const BallCurveSampler sampler(spec.grid, spec.beta, st.radius, st.seed);
  const auto& pts = spec.grid->points();
  PositivityMargins out;

  const ForwardCurve h = sampler.sample_nonneg(sample_index);
  out.min_margin = std::numeric_limits<double>::infinity();
  if (spec.rn_jumps.has_jumps()) {
    std::vector<double> g;
    for_each_quadrature_mark(spec.rn_jumps.measure, reduced_mc(spec.mark_mc, st.mark_nodes),
                             [&](double, std::span<const double> x) {
                               spec.rn_jumps.gamma(h, x, g);
                               for (std::size_t i = 0; i < g.size(); ++i) {
                                 const double m = h.values[i] + g[i];
                                 if (m < out.min_margin) {
                                   out.min_margin = m;
                                   out.margin_z = pts[i];
                                   out.margin_mark = x.empty() ? 0.0 : x[0];
                                 }
                               }
                             });
  } else {
    out.min_margin = 0.0;  // h itself is nonnegative by construction
  }

  const auto bs = sampler.sample_boundary(sample_index);
  out.boundary_z = pts[bs.zero_index];
  if (spec.rn_jumps.has_jumps()) {
    std::vector<double> g;
    for_each_quadrature_mark(spec.rn_jumps.measure, reduced_mc(spec.mark_mc, st.mark_nodes),
                             [&](double, std::span<const double> x) {
                               spec.rn_jumps.gamma(bs.h, x, g);
                               out.boundary_field =
                                   std::max(out.boundary_field, std::abs(g[bs.zero_index]));
                             });
  }
  std::vector<double> col;
  for (int j = 0; j < spec.vol.factors; ++j) {
    spec.vol.column(bs.h, j, col);
    const double aj = std::sqrt(spec.cov.eigenvalues[static_cast<std::size_t>(j)]) *
                      col[bs.zero_index];
    out.boundary_vol = std::max(out.boundary_vol, std::abs(aj));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Audit drivers

namespace {

using PairPredicate = std::function<double(std::uint64_t)>;

// Deterministic indexed sup with witness; skips NaN (degenerate) samples.
CheckItem sup_audit(const std::string& name, double bound, std::size_t n,
                    const PairPredicate& pred) {
  CheckItem item;
  item.name = name;
  item.bound = bound;
  double sup = 0.0;
  std::uint64_t arg = 0;
  std::size_t used = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double r = pred(i);
    if (std::isnan(r)) continue;
    ++used;
    if (r > sup) {
      sup = r;
      arg = i;
    }
  }
  if (used == 0) throw StructuralError(name + ": all sampled pairs were degenerate");
  item.estimate = sup;
  item.samples_used = used;
  if (!(sup <= bound)) {
    item.outcome = CheckOutcome::failed;
    Witness w;
    w.sample_index = arg;
    w.description = "replay with this sample index reproduces the estimate";
    w.data["value"] = sup;
    w.data["bound"] = bound;
    item.witness = w;
  }
  return item;
}

}  // namespace

CheckItem check_lipschitz_rn(const ModelSpec& spec, double l_declared, std::size_t n_pairs,
                             const CheckSettings& st) {
  return sup_audit("lipschitz_rn", l_declared, n_pairs,
                   [&](std::uint64_t i) { return lipschitz_rn_ratio(spec, st, i); });
}

CheckItem check_growth_rn(const ModelSpec& spec, double l_declared, std::size_t n_samples,
                          const CheckSettings& st) {
  return sup_audit("growth_rn", l_declared, n_samples,
                   [&](std::uint64_t i) { return growth_rn_value(spec, st, i); });
}

CheckItem check_lipschitz_real(const ModelSpec& spec, double l_declared, std::size_t n_pairs,
                               const CheckSettings& st) {
  CheckItem item = sup_audit("lipschitz_real", l_declared, n_pairs,
                             [&](std::uint64_t i) { return lipschitz_real_ratio(spec, st, i); });
  // Finiteness of int ||gamma(0,.)||^2_{beta'} dF at the zero curve.
  double at_zero = 0.0;
  if (spec.real_jumps.has_jumps()) {
    const BetaMetric mbp(spec.grid, spec.beta_prime);
    const ForwardCurve zero = spec.blank();
    std::vector<double> g;
    for_each_quadrature_mark(spec.real_jumps.measure, reduced_mc(spec.mark_mc, st.mark_nodes),
                             [&](double w, std::span<const double> x) {
                               spec.real_jumps.gamma(zero, x, g);
                               at_zero += w * mbp.norm_sq(g);
                             });
  }
  item.note = "gamma0_sq_int=" + fmt(at_zero);
  if (!std::isfinite(at_zero)) {
    item.outcome = CheckOutcome::failed;
    Witness w;
    w.sample_index = 0;
    w.description = "int ||gamma(0,.)||^2 dF is not finite";
    w.data["value"] = at_zero;
    item.witness = w;
  }
  return item;
}

CheckItem check_vol_smoothness(const ModelSpec& spec, std::size_t n_samples,
                               const CheckSettings& st) {
  CheckItem item;
  item.name = "vol_smoothness";
  // No declared constant here: the audit demands a finite, stably computable
  // estimate.  Non-convergent difference stencils are inconclusive (distinct
  // from a violation); a non-finite ratio is one.
  item.bound = std::numeric_limits<double>::infinity();
  double sup = 0.0;
  std::uint64_t arg = 0;
  std::size_t used = 0, breakdowns = 0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    bool ok = true;
    const double r = vol_smoothness_ratio(spec, st, i, &ok);
    if (std::isnan(r)) continue;
    ++used;
    if (!ok) ++breakdowns;
    if (r > sup) {
      sup = r;
      arg = i;
    }
  }
  if (used == 0) throw StructuralError("vol_smoothness: all sampled pairs were degenerate");
  item.estimate = sup;
  item.samples_used = used;
  if (breakdowns > 0) {
    item.outcome = CheckOutcome::inconclusive;
    item.note = "finite-difference breakdown on " + std::to_string(breakdowns) + " sample(s)";
  } else if (!std::isfinite(sup)) {
    item.outcome = CheckOutcome::failed;
    Witness w;
    w.sample_index = arg;
    w.description = "derivative functional not finite";
    w.data["value"] = sup;
    item.witness = w;
  }
  return item;
}

CheckItem check_positivity_conditions(const ModelSpec& spec, std::size_t n_samples,
                                      const CheckSettings& st) {
  CheckItem item;
  item.name = "positivity";
  item.bound = st.positivity_tol;
  double worst_margin = std::numeric_limits<double>::infinity();
  PositivityMargins worst_m, worst_b;
  std::uint64_t arg_m = 0, arg_b = 0;
  double worst_boundary = 0.0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    const auto m = positivity_margins(spec, st, i);
    if (m.min_margin < worst_margin) {
      worst_margin = m.min_margin;
      worst_m = m;
      arg_m = i;
    }
    const double b = std::max(m.boundary_field, m.boundary_vol);
    if (b > worst_boundary) {
      worst_boundary = b;
      worst_b = m;
      arg_b = i;
    }
  }
  item.samples_used = n_samples;
  item.estimate = std::max(-std::min(worst_margin, 0.0), worst_boundary);
  const bool margin_ok = worst_margin >= -st.positivity_tol;
  const bool boundary_ok = worst_boundary <= st.positivity_tol;
  item.note = "min_margin=" + fmt(worst_margin) + " boundary_max=" + fmt(worst_boundary);
  if (!margin_ok || !boundary_ok) {
    item.outcome = CheckOutcome::failed;
    Witness w;
    if (!margin_ok) {
      w.sample_index = arg_m;
      w.description = "h + jump field drops below zero";
      w.data["margin"] = worst_m.min_margin;
      w.data["z"] = worst_m.margin_z;
      w.data["mark"] = worst_m.margin_mark;
    } else {
      w.sample_index = arg_b;
      w.description = "coefficient does not vanish at a zero of the curve";
      w.data["value"] = worst_boundary;
      w.data["z"] = worst_b.boundary_z;
    }
    item.witness = w;
  }
  return item;
}

CheckItem check_measure_identity(const ModelSpec& spec, std::size_t n_samples,
                                 const CheckSettings& st) {
  CheckItem item;
  item.name = "measure_identity";
  const auto tests =
      default_mark_test_functions(spec.grid, spec.beta_prime, st.identity_scale);
  const BallCurveSampler sampler(spec.grid, spec.beta, st.radius, st.seed);
  double sup = 0.0, max_se = 0.0;
  std::uint64_t arg = 0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    const auto res = measure_identity_residual(spec, sampler.sample(i), tests);
    if (res.max_abs > sup) {
      sup = res.max_abs;
      arg = i;
    }
    max_se = std::max(max_se, res.max_se);
  }
  item.samples_used = n_samples;
  item.estimate = sup;
  item.bound = st.identity_tol + 5.0 * max_se;
  item.note = "mc_se=" + fmt(max_se);
  if (!(sup <= item.bound)) {
    item.outcome = CheckOutcome::failed;
    Witness w;
    w.sample_index = arg;
    w.description = "change-of-variables identity violated";
    w.data["residual"] = sup;
    item.witness = w;
  }
  return item;
}

CheckItem check_drift_condition(const ModelSpec& spec, std::size_t n_samples,
                                const CheckSettings& st) {
  CheckItem item;
  item.name = "drift_condition";
  item.bound = st.mpre_tol;
  const BallCurveSampler sampler(spec.grid, spec.beta, st.radius, st.seed);
  double sup = 0.0, theta_sq_max = 0.0, y_int_max = 0.0;
  std::uint64_t arg = 0;
  ForwardCurve jc;
  jc.grid = spec.grid;
  jc.beta = spec.beta_prime;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    const ForwardCurve h = sampler.sample(i);
    const double r = mpre_residual(spec, h);
    if (r > sup) {
      sup = r;
      arg = i;
    }
    double tsq = 0.0;
    for (double th : mpr_theta(spec, h)) tsq += th * th;
    theta_sq_max = std::max(theta_sq_max, tsq);
    if (spec.real_jumps.has_jumps()) {
      double acc = 0.0;
      std::vector<double> g;
      for_each_quadrature_mark(spec.real_jumps.measure, reduced_mc(spec.mark_mc, st.mark_nodes),
                               [&](double w, std::span<const double> x) {
                                 spec.real_jumps.gamma(h, x, g);
                                 jc.values = g;
                                 const double y = spec.mpr.eval_y(h, jc);
                                 if (!(y > 0.0))
                                   throw DomainError("jump intensity ratio Y must be positive");
                                 const double s = 1.0 - std::sqrt(y);
                                 acc += w * s * s;
                               });
      y_int_max = std::max(y_int_max, acc);
    }
  }
  item.samples_used = n_samples;
  item.estimate = sup;
  item.note = "theta_sq_max=" + fmt(theta_sq_max) + " y_int_max=" + fmt(y_int_max);
  if (!(sup <= st.mpre_tol) || !std::isfinite(theta_sq_max) || !std::isfinite(y_int_max)) {
    item.outcome = CheckOutcome::failed;
    Witness w;
    w.sample_index = arg;
    w.description = "market-price-of-risk equation residual too large";
    w.data["residual"] = sup;
    w.data["theta_sq"] = theta_sq_max;
    item.witness = w;
  }
  return item;
}

CheckReport run_all_checks(const ModelSpec& spec, const DeclaredBounds& bounds,
                           std::size_t n_pairs, std::size_t n_samples,
                           const CheckSettings& st) {
  CheckReport rep;
  rep.spec_fingerprint = spec.fingerprint;
  rep.spec_hash = fnv1a(spec.fingerprint);
  rep.tolerances = {{"radius", st.radius},
                    {"positivity_tol", st.positivity_tol},
                    {"identity_tol", st.identity_tol},
                    {"mpre_tol", st.mpre_tol},
                    {"fd_step_rel", st.fd_step_rel},
                    {"lipschitz_rn", bounds.lipschitz_rn},
                    {"growth_rn", bounds.growth_rn},
                    {"lipschitz_real", bounds.lipschitz_real}};
  rep.add(check_lipschitz_rn(spec, bounds.lipschitz_rn, n_pairs, st));
  rep.add(check_growth_rn(spec, bounds.growth_rn, n_samples, st));
  if (spec.real_drift.eval) {
    rep.add(check_lipschitz_real(spec, bounds.lipschitz_real, n_pairs, st));
  } else {
    CheckItem skipped;
    skipped.name = "lipschitz_real";
    skipped.outcome = CheckOutcome::inconclusive;
    skipped.note = "no real-world drift field declared";
    rep.add(std::move(skipped));
  }
  rep.add(check_vol_smoothness(spec, n_samples, st));
  rep.add(check_positivity_conditions(spec, n_samples, st));
  rep.add(check_measure_identity(spec, n_samples, st));
  if (spec.real_drift.eval) {
    rep.add(check_drift_condition(spec, n_samples, st));
  } else {
    CheckItem skipped;
    skipped.name = "drift_condition";
    skipped.outcome = CheckOutcome::inconclusive;
    skipped.note = "no real-world drift field declared";
    rep.add(std::move(skipped));
  }
  return rep;
}

}  // namespace hjmm
