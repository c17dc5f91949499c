// Acceptance gate.  Eight criteria, one PASS/FAIL line each, exit 0 iff all
// pass.  Every tolerance is pinned here; the Monte Carlo sizes are chosen so
// the statistical gates hold with a wide margin at the fixed seed.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "hjmm/checks.hpp"
#include "hjmm/diagnostics.hpp"
#include "hjmm/simulate.hpp"
#include "hjmm/stats.hpp"
#include "hjmm/zoo.hpp"

namespace {

using namespace hjmm;

constexpr std::uint64_t kSeed = 20240901;
constexpr double kBeta = 0.5;
constexpr double kBetaPrime = 1.0;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

GridPtr grid_for(double dz, double z_max) {
  return CurveGrid::uniform(dz, static_cast<std::size_t>(std::llround(z_max / dz)));
}

ModelSpec on_grid(const ModelParams& p, double dz, double z_max) {
  return build_model(p, grid_for(dz, z_max), kBeta, kBetaPrime, CovarianceSpec{{1.0}});
}

struct Line {
  bool ok = false;
  std::string text;
};

// --- 1. Discounted bonds are martingales under the pricing measure ---------

Line criterion_martingale() {
  const auto t0 = std::chrono::steady_clock::now();
  ModelParams p;
  p.vol.sigma = 0.01;
  p.vol.kappa = 0.5;
  p.h0_flat = 0.03;

  SimConfig cfg;
  cfg.n_paths = 20000;
  cfg.dt = 1.0 / 250.0;
  cfg.horizon = 1.0;
  cfg.seed = kSeed;
  cfg.measure = Measure::risk_neutral;

  BondTestOptions opts;
  opts.n_monitors = 8;
  opts.calibration_paths = 10000;  // dt/2 rerun sizing the O(dt) bias allowance

  const std::vector<double> mats{1.0, 2.0, 5.0};
  auto factory = [&p](double dz) { return on_grid(p, dz, 5.0); };

  bool ok = true;
  double worst_se = 0.0, c_diff = 0.0, c_jump = 0.0;
  auto res = martingale_test(factory, cfg, mats, opts);
  for (const auto& r : res) {
    ok = ok && r.passed && r.n_excluded == 0;
    worst_se = std::max(worst_se, r.max_dev_se);
    c_diff = r.allowance_c;
  }
  p.jumps.family = "exp_jump";
  p.jumps.intensity = 2.0;
  p.jumps.mark_size = 0.01;
  auto res_j = martingale_test([&p](double dz) { return on_grid(p, dz, 5.0); }, cfg, mats, opts);
  for (const auto& r : res_j) {
    ok = ok && r.passed && r.n_excluded == 0;
    worst_se = std::max(worst_se, r.max_dev_se);
    c_jump = r.allowance_c;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ok = ok && wall <= 120.0;
  return {ok, fmt("martingale bonds under pricing measure: max dev %.2f se units, "
                  "allowance C=%.3g (diffusion) %.3g (jumps), wall %.0fs",
                  worst_se, c_diff, c_jump, wall)};
}

// --- 2. Risk premium appears as real-world bond drift ----------------------

Line criterion_real_drift() {
  ModelParams p;
  p.vol.sigma = 0.01;
  p.vol.kappa = 0.5;
  p.h0_flat = 0.03;
  p.mpr.zeta_level = 0.5;  // constant curve; its beta-norm is exactly 0.5
  p.real_drift = "classical";
  auto spec = on_grid(p, 1.0 / 25.0, 5.0);

  SimConfig cfg;
  cfg.n_paths = 400000;
  cfg.dt = 1.0 / 25.0;
  cfg.horizon = 3.0;
  cfg.seed = kSeed;
  cfg.measure = Measure::real_world;

  const double maturity = 5.0;
  auto r = drift_detection(spec, cfg, maturity, 8);

  // Scalar sign oracle: positive market price of risk lowers real-world
  // forward rates, so discounted bonds drift up; the predicted slope sign is
  // sign(theta * int_0^{T*} c).
  const auto theta = mpr_theta(spec, spec.h0);
  std::vector<double> c;
  spec.vol.column(spec.h0, 0, c);
  double gc = 0.0;
  const double dz = spec.grid->uniform_step();
  const auto n_mat = static_cast<std::size_t>(std::llround(maturity / dz));
  for (std::size_t i = 0; i < n_mat; ++i) gc += 0.5 * (c[i] + c[i + 1]) * dz;
  const double predicted = theta[0] * gc > 0.0 ? 1.0 : -1.0;

  const bool ok = std::abs(r.t_stat) > 3.0 && r.slope.value * predicted > 0.0;
  return {ok, fmt("real-world drift detected: slope %.3g (predicted sign %+g), t = %.2f",
                  r.slope.value, predicted, r.t_stat)};
}

// --- 3. Density-reweighted real-world pricing matches risk-neutral ---------

Line criterion_girsanov() {
  ModelParams p;
  p.vol.sigma = 0.01;
  p.vol.kappa = 0.5;
  p.jumps.family = "exp_jump";
  p.jumps.intensity = 2.0;
  p.jumps.mark_size = 0.01;
  p.mpr.zeta_level = 0.3;
  p.mpr.y_ratio = 2.0;  // doubled jump intensity under the pricing measure
  p.real_drift = "mpre";
  p.h0_flat = 0.03;
  auto spec = on_grid(p, 1.0 / 100.0, 3.0);

  SimConfig cfg;
  cfg.n_paths = 20000;
  cfg.dt = 1.0 / 100.0;
  cfg.horizon = 1.0;
  cfg.seed = kSeed;
  cfg.measure = Measure::real_world;

  GirsanovOptions opts;
  opts.stop_levels = {2, 5, 10};
  opts.dt_allowance_coeff = 0.0;  // state-free fields: the two laws agree exactly

  auto rep = girsanov_consistency(spec, cfg, opts);
  bool ok = rep.outcome == CheckOutcome::passed && rep.z_ok && rep.min_z > 0.0 &&
            rep.functionals.size() == 5;
  double worst = 0.0;
  for (const auto& fa : rep.functionals) {
    ok = ok && fa.ok;
    worst = std::max(worst, fa.diff_se_units);
  }
  for (const auto& s : rep.stopped) ok = ok && s.ok;
  return {ok, fmt("reweighted pricing: E[Z_T] = %.5f +- %.5f, 5 functionals within "
                  "%.2f se units, min Z = %.3g, stopped levels {2,5,10} ok",
                  rep.z_mean.value, rep.z_mean.se, worst, rep.min_z)};
}

// --- 4. No-arbitrage drift vs scalar quadrature oracle ---------------------

Line criterion_drift_oracle() {
  const double sigma = 0.01, kappa = 0.5, lambda = 2.0, x0 = 0.01;
  ModelParams p;
  p.vol.sigma = sigma;
  p.vol.kappa = kappa;
  auto diff = on_grid(p, 1.0 / 250.0, 5.0);
  p.jumps.family = "exp_jump";
  p.jumps.intensity = lambda;
  p.jumps.mark_size = x0;
  auto jump = on_grid(p, 1.0 / 250.0, 5.0);

  auto xi_d = hjm_drift_xi(diff, diff.h0);
  auto xi_j = hjm_drift_xi(jump, jump.h0);
  const auto& pts = diff.grid->points();
  const std::size_t m = pts.size();

  double err_d = 0.0, err_j = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double z = pts[i];
    const double od = sigma * sigma * std::exp(-kappa * z) * (1.0 - std::exp(-kappa * z)) / kappa;
    const double oa = lambda * x0 * std::exp(-z) * std::expm1(x0 * (1.0 - std::exp(-z)));
    err_d = std::max(err_d, std::abs(xi_d.values[i] - od));
    err_j = std::max(err_j, std::abs(xi_j.values[i] - (od + oa)));
  }
  const bool tails = xi_d.values.back() == 0.0 && xi_j.values.back() == 0.0;

  // Frozen 60-digit anchor for the jump correction at z = 1.
  const std::size_t i1 = diff.grid->index_of(1.0);
  const double anchor = std::abs((xi_j.values[i1] - xi_d.values[i1]) - 4.6656137750644635e-5);

  const bool ok = err_d <= 1e-8 && err_j <= 1e-8 && tails && anchor <= 1e-8;
  return {ok, fmt("no-arbitrage drift vs oracle: max err %.2e (diffusion) %.2e (with jumps), "
                  "tail exactly 0: %s, anchor err %.1e",
                  err_d, err_j, tails ? "yes" : "no", anchor)};
}

// --- 5. Jump drift term vs its maturity derivative -------------------------

Line criterion_alpha_derivative() {
  ModelParams p;
  p.vol.sigma = 0.01;
  p.vol.kappa = 0.5;
  p.jumps.family = "exp_jump";
  p.jumps.intensity = 2.0;
  p.jumps.mark_size = 0.01;
  auto spec = on_grid(p, 1.0 / 1000.0, 5.0);

  auto [alpha, dalpha] = alpha_and_derivative(spec, spec.h0);
  const double dz = spec.grid->uniform_step();
  const std::size_t m = spec.grid->size();
  // Interior points only: the final cell holds the flat-tail clamp, where the
  // field is not differentiable.
  double err = 0.0;
  for (std::size_t i = 1; i + 2 < m; ++i) {
    const double fd = (alpha.values[i + 1] - alpha.values[i - 1]) / (2.0 * dz);
    err = std::max(err, std::abs(fd - dalpha.values[i]));
  }
  const bool ok = err <= 1e-6;
  return {ok, fmt("jump drift derivative: max |fd(alpha) - d_alpha| = %.2e at dz = 1/1000", err)};
}

// --- 6. Condition audits: pass, fail, witness replay -----------------------

Line criterion_audits() {
  CheckSettings st;  // default seed/radius; pinned in checks.hpp
  ModelParams hw;
  hw.vol.sigma = 0.01;
  hw.vol.kappa = 0.5;
  auto spec_hw = on_grid(hw, 0.05, 5.0);

  // Closed-form constants: state-free fields have Lipschitz constant 0 and
  // growth constant sigma * ||e^{-kappa z}||_beta on this grid.
  auto shape = sample_curve(spec_hw.grid, kBeta,
                            [&](double z) { return std::exp(-hw.vol.kappa * z); }, true);
  const double s = BetaMetric(spec_hw.grid, kBeta).norm(shape);

  auto lip = check_lipschitz_rn(spec_hw, 1e-12, 64, st);
  auto grw = check_growth_rn(spec_hw, hw.vol.sigma * s * (1.0 + 1e-9), 64, st);
  const bool pass_part = lip.passed() && grw.passed();

  // Norm-proportional volatility with the cap far outside the sampled ball:
  // the true constant is sigma * ||shape||, so declaring 90% of it must fail,
  // and the witness index must replay to the reported estimate bitwise.
  ModelParams cp;
  cp.vol.family = "capped_proportional";
  cp.vol.sigma = 0.01;
  cp.vol.kappa = 0.5;
  cp.vol.cap = 1e6;
  auto spec_cp = on_grid(cp, 0.05, 5.0);
  auto bad = check_lipschitz_rn(spec_cp, 0.9 * cp.vol.sigma * s, 64, st);
  const bool fail_part = !bad.passed() && bad.witness.has_value() &&
                         lipschitz_rn_ratio(spec_cp, st, bad.witness->sample_index) ==
                             bad.estimate;

  // Nonvanishing volatility at a zero of the curve: the positivity audit must
  // fail on the Gaussian model and point at the offending maturity.
  auto pos = check_positivity_conditions(spec_hw, 64, st);
  const bool pos_part = !pos.passed() && pos.witness.has_value() && pos.witness->data.count("z");

  const bool ok = pass_part && fail_part && pos_part;
  return {ok, fmt("condition audits: gaussian passes (L=0, growth %.4g), norm-proportional "
                  "fails at 0.9x with bitwise witness replay: %s, positivity fails with "
                  "witness z=%.3g",
                  hw.vol.sigma * s, fail_part ? "yes" : "no",
                  pos_part ? pos.witness->data.at("z") : -1.0)};
}

// --- 7. Positivity: preserving model and gaussian oracle -------------------

Line criterion_positivity() {
  // Pointwise-proportional coefficients vanish with the curve; no negative
  // value should appear anywhere in the ensemble.
  ModelParams pp;
  pp.vol.family = "pointwise_proportional";
  pp.vol.sigma = 0.2;
  pp.vol.kappa = 0.5;
  pp.jumps.family = "pointwise_exp_jump";
  pp.jumps.intensity = 2.0;
  pp.jumps.mark_size = 0.05;
  pp.h0_flat = 0.03;
  auto spec_pp = on_grid(pp, 1.0 / 250.0, 2.0);

  SimConfig cfg;
  cfg.n_paths = 10000;
  cfg.dt = 1.0 / 250.0;
  cfg.horizon = 1.0;
  cfg.seed = kSeed;
  cfg.measure = Measure::risk_neutral;
  auto res_pp = positivity_test(spec_pp, cfg, 1e-3);

  // Gaussian model started near zero: the scheme's terminal law is exactly
  // gaussian with scheme-computable mean and variance, so the negative
  // fraction at a probe must match Phi(-mean/sd) within 2 se.
  ModelParams hw;
  hw.vol.sigma = 0.01;
  hw.vol.kappa = 0.5;
  hw.h0_flat = 0.005;
  auto spec_hw = on_grid(hw, 1.0 / 250.0, 2.0);
  const std::vector<std::pair<double, double>> probes{{0.5, 0.5}, {1.0, 0.2}, {1.0, 1.0}};
  auto res_hw = positivity_test(spec_hw, cfg, 1.0, probes);

  auto xi = hjm_drift_xi(spec_hw, spec_hw.h0);
  std::vector<std::vector<double>> cols(spec_hw.cov.eigenvalues.size());
  for (std::size_t j = 0; j < cols.size(); ++j) spec_hw.vol.column(spec_hw.h0, j, cols[j]);
  const std::size_t m = spec_hw.grid->size();
  const double dt = cfg.dt, dz = spec_hw.grid->uniform_step();

  bool probes_ok = res_hw.probes.size() == probes.size();
  std::string detail;
  for (std::size_t q = 0; q < res_hw.probes.size(); ++q) {
    const auto n = static_cast<std::size_t>(std::llround(res_hw.probes[q].t / dt));
    const auto i = static_cast<std::size_t>(std::llround(res_hw.probes[q].z / dz));
    double mean = hw.h0_flat, var = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t idx = std::min(i + n - 1 - k, m - 1);
      mean += dt * xi.values[idx];
      for (std::size_t j = 0; j < cols.size(); ++j)
        var += spec_hw.cov.eigenvalues[j] * cols[j][idx] * cols[j][idx] * dt;
    }
    const double pred = normal_cdf(-mean / std::sqrt(var));
    const double se = std::sqrt(pred * (1.0 - pred) / static_cast<double>(cfg.n_paths));
    const double dev = std::abs(res_hw.probes[q].negative_fraction.value - pred);
    probes_ok = probes_ok && dev <= 2.0 * se;
    detail += fmt("%s%.1fse", q ? "," : "", dev / se);
  }

  const bool ok = res_pp.passed && res_pp.fraction_negative <= 1e-3 && probes_ok;
  return {ok, fmt("positivity: preserving model fraction %.1e over 10000 paths, gaussian "
                  "probes off oracle by {%s} (gate 2se)",
                  res_pp.fraction_negative, detail.c_str())};
}

// --- 8. Numerics: strong order, mild residual, identities, determinism -----

double coupled_difference(const ModelParams& p, double dt, std::size_t n_paths, double horizon,
                          double z_max, double window) {
  // Coupled refinement: one Brownian path at resolution dt/2, pair-summed for
  // the dt chain; terminal curves compared on the coarse grid restricted to
  // [0, window] (window + horizon = z_max keeps the flat-tail cell and its
  // transport image out of the comparison).
  auto coarse = on_grid(p, dt, z_max);
  auto fine = on_grid(p, dt / 2.0, z_max);
  auto wgrid = grid_for(dt, window);
  BetaMetric metric(wgrid, kBeta);
  const auto nc = static_cast<std::size_t>(std::llround(horizon / dt));
  MeanVar mv;
  std::vector<double> diff(wgrid->size());
  for (std::size_t path = 0; path < n_paths; ++path) {
    RandomSource rs(StreamKey{kSeed, path, substream::brownian});
    ForwardCurve hc = coarse.h0, hf = fine.h0;
    for (std::size_t k = 0; k < nc; ++k) {
      const double w1 = rs.normal() * std::sqrt(dt / 2.0);
      const double w2 = rs.normal() * std::sqrt(dt / 2.0);
      double wf = w1;
      hf = step_curve(fine, Measure::risk_neutral, hf, {&wf, 1}, {}, dt / 2.0);
      wf = w2;
      hf = step_curve(fine, Measure::risk_neutral, hf, {&wf, 1}, {}, dt / 2.0);
      double wc = w1 + w2;
      hc = step_curve(coarse, Measure::risk_neutral, hc, {&wc, 1}, {}, dt);
    }
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = hc.values[i] - hf.values[2 * i];
    mv.add(metric.norm(diff));
  }
  return mv.mean;
}

double coupled_order(const ModelParams& p) {
  // Least-squares slope of log2 E||X^dt - X^{dt/2}|| against log2 dt over
  // four dyadic levels; steadier than a single-ratio estimate.
  const double dts[4]{1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0, 1.0 / 400.0};
  double num = 0.0;
  for (int l = 0; l < 4; ++l) {
    const double d = coupled_difference(p, dts[l], 300, 0.5, 2.0, 1.5);
    num += (1.5 - l) * std::log2(d);
  }
  return num / 5.0;  // x-offsets {1.5, 0.5, -0.5, -1.5}, sum of squares 5
}

Line criterion_numerics() {
  // (a) Strong convergence under coupled refinement: a state-free and a
  // state-dependent (pointwise-proportional) volatility.
  ModelParams sf;
  sf.vol.sigma = 0.01;
  sf.vol.kappa = 0.5;
  sf.h0_flat = 0.03;
  ModelParams sp;
  sp.vol.family = "pointwise_proportional";
  sp.vol.sigma = 0.2;
  sp.vol.kappa = 0.5;
  sp.h0_flat = 0.03;
  const double so1 = coupled_order(sf), so2 = coupled_order(sp);
  const bool strong_ok = std::min(so1, so2) >= 0.4;

  // (b) Mild-form residual at first order on a drift-only model: zero vol,
  // jump intensity pushed to ~0 under the real-world measure while the
  // rearranged drift stays finite, so the path is deterministic and the
  // residual isolates the quadrature bias.
  ModelParams dp;
  dp.vol.sigma = 0.0;
  dp.jumps.family = "exp_jump";
  dp.jumps.intensity = 2.0;
  dp.jumps.mark_size = 0.02;
  dp.mpr.y_ratio = 1e8;
  dp.real_drift = "mpre";
  dp.h0_flat = 0.03;
  const std::vector<MildProbe> probes{{0.5, 0.5}, {0.5, 1.0}};
  double r[3];
  int li = 0;
  for (double dt : {1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0}) {
    auto spec = on_grid(dp, dt, 3.0);
    SimConfig cfg;
    cfg.n_paths = 4;
    cfg.dt = dt;
    cfg.horizon = 0.5;
    cfg.seed = kSeed;
    cfg.measure = Measure::real_world;
    r[li++] = mild_residual(spec, cfg, probes).max_abs;
  }
  const double mo1 = std::log2(r[0] / r[1]), mo2 = std::log2(r[1] / r[2]);
  const double mo_extrap = 2.0 * mo2 - mo1;  // removes the O(dt) order correction
  const bool mild_ok = r[0] > r[1] && r[1] > r[2] && std::min(mo1, mo2) >= 0.9 &&
                       mo_extrap >= 0.97;

  // (c) Exact identities.  Pure transport: two steps equal a two-cell shift
  // bitwise; the norm of a shifted curve satisfies the exact one-cell
  // recursion; a frozen 60-digit norm matches to 1e-12.
  ModelParams zp;
  zp.vol.sigma = 0.0;
  auto zspec = on_grid(zp, 0.05, 4.0);
  auto h = sample_curve(zspec.grid, kBeta, [](double z) {
    return 0.02 + 0.01 * std::exp(-0.7 * z) + 0.005 * std::cos(z);
  });
  double w0 = 0.0;
  auto s1 = step_curve(zspec, Measure::risk_neutral, h, {&w0, 1}, {}, 0.05);
  auto s2 = step_curve(zspec, Measure::risk_neutral, s1, {&w0, 1}, {}, 0.05);
  const std::size_t zm = zspec.grid->size();
  double shift_err = 0.0;
  for (std::size_t i = 0; i < zm; ++i)
    shift_err = std::max(shift_err,
                         std::abs(s2.values[i] - h.values[std::min(i + 2, zm - 1)]));

  BetaMetric zmetric(zspec.grid, kBeta);
  const double dz = zspec.grid->uniform_step();
  const double cell0 = std::pow((h.values[1] - h.values[0]) / dz, 2) *
                       (std::exp(kBeta * dz) - 1.0) / kBeta;
  const double lhs = zmetric.norm_sq(s1.values);
  const double rhs = s1.values[0] * s1.values[0] +
                     std::exp(-kBeta * dz) *
                         (zmetric.norm_sq(h.values) - h.values[0] * h.values[0] - cell0);
  const double norm_shift_err = std::abs(lhs - rhs);

  auto fgrid = grid_for(0.1, 4.0);
  auto fh = sample_curve(fgrid, kBeta, [](double z) { return std::exp(-0.7 * z); });
  const double frozen = 1.5296608801849035;  // 60-digit offline evaluation
  const double frozen_err = std::abs(BetaMetric(fgrid, kBeta).norm_sq(fh.values) / frozen - 1.0);
  const bool ids_ok = shift_err == 0.0 && norm_shift_err <= 1e-12 && frozen_err <= 1e-12;

  // (d) Bitwise reproducibility across thread counts.
  ModelParams rp;
  rp.vol.sigma = 0.01;
  rp.vol.kappa = 0.5;
  rp.jumps.family = "exp_jump";
  rp.jumps.intensity = 2.0;
  rp.jumps.mark_size = 0.01;
  auto rspec = on_grid(rp, 1.0 / 100.0, 2.0);
  std::vector<std::vector<double>> runs;
  for (unsigned threads : {1u, 2u, 3u}) {
    SimConfig cfg;
    cfg.n_paths = 64;
    cfg.dt = 1.0 / 100.0;
    cfg.horizon = 0.5;
    cfg.seed = kSeed;
    cfg.threads = threads;
    cfg.measure = Measure::risk_neutral;
    TerminalFunctionalCollector tf(rspec, cfg);
    BondMonitorCollector bm(rspec, cfg, {1.0, 2.0}, 4);
    std::vector<Collector*> cs{&tf, &bm};
    simulate(rspec, cfg, cs);
    auto all = tf.values;
    for (std::size_t path = 0; path < cfg.n_paths; ++path)
      for (std::size_t mat = 0; mat < 2; ++mat)
        for (std::size_t mon = 0; mon < bm.monitor_times().size(); ++mon)
          all.push_back(bm.value(path, mat, mon));
    runs.push_back(std::move(all));
  }
  const bool threads_ok =
      runs[0].size() == runs[1].size() && runs[1].size() == runs[2].size() &&
      std::memcmp(runs[0].data(), runs[1].data(), runs[0].size() * sizeof(double)) == 0 &&
      std::memcmp(runs[0].data(), runs[2].data(), runs[0].size() * sizeof(double)) == 0;

  const bool ok = strong_ok && mild_ok && ids_ok && threads_ok;
  return {ok, fmt("numerics: strong orders %.2f (state-free) %.2f (state-dep), mild-residual "
                  "orders %.3f/%.3f (extrapolated %.3f), identities (shift %.1g, norm %.1e, "
                  "frozen %.1e), threads bitwise: %s",
                  so1, so2, mo1, mo2, mo_extrap, shift_err, norm_shift_err, frozen_err,
                  threads_ok ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Entry {
    const char* tag;
    Line (*fn)();
  };
  const Entry entries[] = {
      {"martingale-q", criterion_martingale},
      {"drift-p", criterion_real_drift},
      {"girsanov", criterion_girsanov},
      {"drift-oracle", criterion_drift_oracle},
      {"alpha-derivative", criterion_alpha_derivative},
      {"condition-audits", criterion_audits},
      {"positivity", criterion_positivity},
      {"numerics", criterion_numerics},
  };
  int failures = 0;
  for (const auto& e : entries) {
    Line line;
    try {
      line = e.fn();
    } catch (const std::exception& ex) {
      line = {false, fmt("exception: %s", ex.what())};
    }
    std::printf("%s: [%s] %s\n", line.ok ? "PASS" : "FAIL", e.tag, line.text.c_str());
    std::fflush(stdout);
    if (!line.ok) ++failures;
  }
  std::printf("acceptance: %d/8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
