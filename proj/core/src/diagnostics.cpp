#include "hjmm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "hjmm/errors.hpp"

namespace hjmm {

namespace {

std::vector<std::size_t> monitor_schedule(std::size_t n_steps, std::size_t n_monitors) {
  if (n_monitors == 0) throw DomainError("monitor count must be positive");
  std::vector<std::size_t> steps;
  for (std::size_t i = 1; i <= n_monitors; ++i) {
    const std::size_t s = (i * n_steps) / n_monitors;
    if (s == 0) continue;
    if (steps.empty() || steps.back() != s) steps.push_back(s);
  }
  return steps;
}

double trapz_prefix(std::span<const double> v, std::size_t cells, double dz) {
  double acc = 0.0;
  for (std::size_t i = 0; i < cells; ++i) acc += v[i] + v[i + 1];
  return 0.5 * dz * acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// Discounted bonds

class BondObserver final : public PathObserver {
 public:
  BondObserver(BondMonitorCollector* c, std::size_t p) : c_(c), p_(p) {}

  void on_step(const StepView& view, std::span<const double> post, double) override {
    sr_sum_ += view.pre[0];
    const auto& mons = c_->monitor_steps_;
    const std::size_t s1 = view.step + 1;
    if (next_ >= mons.size() || s1 != mons[next_]) return;
    const std::size_t n_mat = c_->maturities_.size();
    for (std::size_t m = 0; m < n_mat; ++m) {
      const std::size_t cells = c_->mat_steps_[m] - s1;
      const double d = std::exp(-view.dt * sr_sum_ - trapz_prefix(post, cells, c_->dz_));
      c_->values_[(p_ * n_mat + m) * mons.size() + next_] = d;
    }
    ++next_;
  }

  void end_path(std::size_t, PathStatus status) override {
    c_->valid[p_] = status == PathStatus::ok ? 1 : 0;
  }

 private:
  BondMonitorCollector* c_;
  std::size_t p_;
  double sr_sum_ = 0.0;
  std::size_t next_ = 0;
};

BondMonitorCollector::BondMonitorCollector(const ModelSpec& spec, const SimConfig& cfg,
                                           std::vector<double> maturities,
                                           std::size_t n_monitors)
    : BondMonitorCollector(spec, cfg, std::move(maturities),
                           monitor_schedule(cfg.n_steps(), n_monitors)) {}

BondMonitorCollector::BondMonitorCollector(const ModelSpec& spec, const SimConfig& cfg,
                                           std::vector<double> maturities,
                                           std::vector<std::size_t> monitor_steps)
    : spec_(&spec), maturities_(std::move(maturities)), monitor_steps_(std::move(monitor_steps)) {
  if (maturities_.empty()) throw DomainError("bond monitor: need at least one maturity");
  const std::size_t n = cfg.n_steps();
  if (monitor_steps_.empty() || !std::is_sorted(monitor_steps_.begin(), monitor_steps_.end()) ||
      monitor_steps_.front() == 0 || monitor_steps_.back() > n)
    throw DomainError("bond monitor: bad monitor steps");
  dz_ = spec.grid->uniform_step();
  for (double mat : maturities_) {
    const std::size_t ms = spec.grid->steps_for(mat);
    if (ms >= spec.grid->size()) throw DomainError("bond maturity beyond the grid");
    if (ms < n) throw DomainError("bond maturity shorter than the simulation horizon");
    mat_steps_.push_back(ms);
  }
  for (auto s : monitor_steps_) times_.push_back(static_cast<double>(s) * cfg.dt);
  values_.assign(static_cast<std::size_t>(cfg.n_paths) * maturities_.size() *
                     monitor_steps_.size(),
                 0.0);
  valid.assign(static_cast<std::size_t>(cfg.n_paths), 0);
}

std::unique_ptr<PathObserver> BondMonitorCollector::make_observer(std::size_t path_index) {
  return std::make_unique<BondObserver>(this, path_index);
}

Estimate BondMonitorCollector::estimate(std::size_t mat, std::size_t mon) const {
  MeanVar mv;
  for (std::size_t p = 0; p < valid.size(); ++p)
    if (valid[p]) mv.add(value(p, mat, mon));
  return {mv.mean, mv.se()};
}

std::size_t BondMonitorCollector::n_excluded() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 0));
}

double initial_discounted_bond(const ModelSpec& spec, double maturity) {
  const std::size_t cells = spec.grid->steps_for(maturity);
  if (cells >= spec.grid->size()) throw DomainError("bond maturity beyond the grid");
  return std::exp(-trapz_prefix(spec.h0.values, cells, spec.grid->uniform_step()));
}

std::vector<double> discounted_bond_series(const ModelSpec& spec, const SimResult& res,
                                           std::size_t path, double maturity) {
  if (res.cfg.record_stride != 1)
    throw StructuralError("discounted_bond_series needs record_stride == 1");
  const auto& curves = res.recorded.at(path);
  const std::size_t ms = spec.grid->steps_for(maturity);
  if (ms >= spec.grid->size()) throw DomainError("bond maturity beyond the grid");
  const double dz = spec.grid->uniform_step();
  std::vector<double> out;
  double sr_sum = 0.0;
  for (std::size_t k = 0; k < curves.size() && k <= ms; ++k) {
    if (k > 0) sr_sum += curves[k - 1].values[0];
    out.push_back(std::exp(-res.cfg.dt * sr_sum - trapz_prefix(curves[k].values, ms - k, dz)));
  }
  return out;
}

std::vector<BondTestResult> martingale_test(const ModelFactory& factory, const SimConfig& cfg,
                                            std::span<const double> maturities,
                                            const BondTestOptions& opts) {
  const ModelSpec spec = factory(cfg.dt);
  std::vector<double> mats(maturities.begin(), maturities.end());
  BondMonitorCollector coll(spec, cfg, mats, opts.n_monitors);
  Collector* main_cols[] = {&coll};
  simulate(spec, cfg, main_cols);

  double c_allow = 0.0;
  if (opts.c_override >= 0.0) {
    c_allow = opts.c_override;
  } else if (opts.calibration_paths > 0) {
    // A half-step run exposes the O(dt) scheme bias; the allowance doubles
    // the largest observed gap so first-order bias at step dt is covered.
    SimConfig half = cfg;
    half.dt = 0.5 * cfg.dt;
    half.n_paths = opts.calibration_paths;
    const ModelSpec spec_half = factory(half.dt);
    std::vector<std::size_t> half_steps;  // same monitor times as the main run
    for (auto s : coll.monitor_steps()) half_steps.push_back(2 * s);
    BondMonitorCollector ch(spec_half, half, mats, half_steps);
    Collector* cal_cols[] = {&ch};
    simulate(spec_half, half, cal_cols);
    double gap = 0.0;
    for (std::size_t m = 0; m < mats.size(); ++m)
      for (std::size_t k = 0; k < coll.monitor_times().size(); ++k)
        gap = std::max(gap, std::abs(coll.estimate(m, k).value - ch.estimate(m, k).value));
    c_allow = 2.0 * gap / cfg.dt;
  }

  std::vector<BondTestResult> out;
  for (std::size_t m = 0; m < mats.size(); ++m) {
    BondTestResult r;
    r.maturity = mats[m];
    r.d0 = initial_discounted_bond(spec, mats[m]);
    r.times = coll.monitor_times();
    r.allowance_c = c_allow;
    r.n_excluded = coll.n_excluded();
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      const Estimate e = coll.estimate(m, k);
      r.estimates.push_back(e);
      const double dev = std::abs(e.value - r.d0);
      const double ratio =
          e.se > 0 ? dev / e.se : (dev > 0 ? std::numeric_limits<double>::infinity() : 0.0);
      r.max_dev_se = std::max(r.max_dev_se, ratio);
      if (dev > 3.0 * e.se + c_allow * cfg.dt) r.passed = false;
    }
    out.push_back(std::move(r));
  }
  return out;
}

DriftDetectionResult drift_detection(const ModelSpec& spec, const SimConfig& cfg,
                                     double maturity, std::size_t n_monitors) {
  BondMonitorCollector coll(spec, cfg, {maturity}, n_monitors);
  Collector* cols[] = {&coll};
  simulate(spec, cfg, cols);

  const auto& times = coll.monitor_times();
  std::vector<double> xs{0.0};
  xs.insert(xs.end(), times.begin(), times.end());
  const SlopeDesign design(xs);
  const double d0 = initial_discounted_bond(spec, maturity);

  MeanVar mv;
  std::vector<double> ys(xs.size());
  for (std::size_t p = 0; p < coll.valid.size(); ++p) {
    if (!coll.valid[p]) continue;
    ys[0] = d0;
    for (std::size_t k = 0; k < times.size(); ++k) ys[k + 1] = coll.value(p, 0, k);
    mv.add(design.slope(ys));
  }
  DriftDetectionResult r;
  r.maturity = maturity;
  r.slope = {mv.mean, mv.se()};
  r.t_stat = mv.se() > 0 ? mv.mean / mv.se() : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Positivity

class PositivityCollector final : public Collector {
 public:
  PositivityCollector(const ModelSpec& spec, const SimConfig& cfg,
                      std::span<const std::pair<double, double>> probes) {
    const std::size_t n = cfg.n_steps();
    for (const auto& [t, z] : probes) {
      const std::size_t s = spec.grid->steps_for(t);
      if (s > n) throw DomainError("positivity probe beyond the horizon");
      probe_steps_.push_back(s);
      probe_idx_.push_back(spec.grid->index_of(z));
    }
    const auto n_paths = static_cast<std::size_t>(cfg.n_paths);
    neg_.assign(n_paths, 0);
    tot_.assign(n_paths, 0);
    worst_.assign(n_paths, std::numeric_limits<double>::infinity());
    probe_neg_.assign(n_paths * probes.size(), 0);
    valid_.assign(n_paths, 0);
  }

  std::unique_ptr<PathObserver> make_observer(std::size_t path_index) override;

  friend class PositivityObserver;
  std::vector<std::size_t> probe_steps_, probe_idx_;
  std::vector<long long> neg_, tot_;
  std::vector<double> worst_;
  std::vector<char> probe_neg_;
  std::vector<char> valid_;
};

class PositivityObserver final : public PathObserver {
 public:
  PositivityObserver(PositivityCollector* c, std::size_t p) : c_(c), p_(p) {}

  void begin_path(std::size_t, std::span<const double> h0, double) override {
    for (std::size_t q = 0; q < c_->probe_steps_.size(); ++q)
      if (c_->probe_steps_[q] == 0)
        c_->probe_neg_[p_ * c_->probe_steps_.size() + q] = h0[c_->probe_idx_[q]] < 0 ? 1 : 0;
  }

  void on_step(const StepView& view, std::span<const double> post, double) override {
    long long neg = 0;
    double lo = c_->worst_[p_];
    for (double v : post) {
      if (v < 0) ++neg;
      lo = std::min(lo, v);
    }
    c_->neg_[p_] += neg;
    c_->tot_[p_] += static_cast<long long>(post.size());
    c_->worst_[p_] = lo;
    const std::size_t s1 = view.step + 1;
    for (std::size_t q = 0; q < c_->probe_steps_.size(); ++q)
      if (c_->probe_steps_[q] == s1)
        c_->probe_neg_[p_ * c_->probe_steps_.size() + q] = post[c_->probe_idx_[q]] < 0 ? 1 : 0;
  }

  void end_path(std::size_t, PathStatus status) override {
    c_->valid_[p_] = status == PathStatus::ok ? 1 : 0;
  }

 private:
  PositivityCollector* c_;
  std::size_t p_;
};

std::unique_ptr<PathObserver> PositivityCollector::make_observer(std::size_t path_index) {
  return std::make_unique<PositivityObserver>(this, path_index);
}

PositivityResult positivity_test(const ModelSpec& spec, const SimConfig& cfg, double threshold,
                                 std::span<const std::pair<double, double>> probes) {
  PositivityCollector coll(spec, cfg, probes);
  Collector* cols[] = {&coll};
  simulate(spec, cfg, cols);

  PositivityResult r;
  r.threshold = threshold;
  long long neg = 0;
  r.worst_value = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < coll.valid_.size(); ++p) {
    if (!coll.valid_[p]) {
      ++r.n_excluded;
      continue;
    }
    neg += coll.neg_[p];
    r.n_samples += coll.tot_[p];
    r.worst_value = std::min(r.worst_value, coll.worst_[p]);
  }
  r.fraction_negative = r.n_samples > 0 ? static_cast<double>(neg) / static_cast<double>(r.n_samples) : 0.0;
  if (!std::isfinite(r.worst_value)) r.worst_value = 0.0;
  r.passed = r.fraction_negative <= threshold;
  for (std::size_t q = 0; q < probes.size(); ++q) {
    MeanVar mv;
    for (std::size_t p = 0; p < coll.valid_.size(); ++p)
      if (coll.valid_[p]) mv.add(coll.probe_neg_[p * probes.size() + q]);
    r.probes.push_back({probes[q].first, probes[q].second, {mv.mean, mv.se()}});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Mild-form residual

class MildCollector final : public Collector {
 public:
  MildCollector(const ModelSpec& spec, const SimConfig& cfg, std::span<const MildProbe> probes)
      : spec_(&spec) {
    m_ = spec.grid->size();
    const auto& jf = cfg.measure == Measure::risk_neutral ? spec.rn_jumps : spec.real_jumps;
    if (jf.has_jumps()) {
      if (jf.state_dependent)
        throw StructuralError("mild residual: state-dependent jump fields are not supported");
      comp_.assign(m_, 0.0);
      std::vector<double> g;
      for_each_quadrature_mark(jf.measure, spec.mark_mc,
                               [&](double w, std::span<const double> x) {
                                 jf.gamma(spec.h0, x, g);
                                 for (std::size_t i = 0; i < m_; ++i) comp_[i] += w * g[i];
                               });
    }
    const std::size_t n = cfg.n_steps();
    for (const auto& pr : probes) {
      const std::size_t nt = spec.grid->steps_for(pr.t);  // dt == grid step
      if (nt > n) throw DomainError("mild residual probe beyond the horizon");
      zi_.push_back(spec.grid->index_of(pr.z));
      nt_.push_back(nt);
    }
    const auto n_paths = static_cast<std::size_t>(cfg.n_paths);
    gap_.assign(n_paths * probes.size(), 0.0);
    valid_.assign(n_paths, 0);
  }

  std::unique_ptr<PathObserver> make_observer(std::size_t path_index) override;

  const ModelSpec* spec_;
  std::size_t m_ = 0;
  std::vector<double> comp_;  // int gamma(., x) dF(dx) at the initial curve
  std::vector<std::size_t> zi_, nt_;
  std::vector<double> gap_;  // [path][probe]: X_t(z) minus the accumulated integrals
  std::vector<char> valid_;
};

class MildObserver final : public PathObserver {
 public:
  MildObserver(MildCollector* c, std::size_t p)
      : c_(c), p_(p), acc_(c->zi_.size(), 0.0), x_(c->zi_.size(), 0.0) {}

  void begin_path(std::size_t, std::span<const double> h0, double) override {
    for (std::size_t q = 0; q < c_->nt_.size(); ++q)
      if (c_->nt_[q] == 0) x_[q] = h0[c_->zi_[q]];
  }

  void on_step(const StepView& view, std::span<const double> post, double) override {
    for (std::size_t q = 0; q < c_->zi_.size(); ++q) {
      const std::size_t nt = c_->nt_[q];
      if (view.step >= nt) continue;
      // Left-rule samples of the shifted integrands: every coefficient of
      // X_k is taken at maturity z + t - k dt.  Including the diffusion and
      // jump terms cancels the martingale fluctuation up to O(dz), so the
      // mean gap isolates the O(dt) drift-quadrature bias.
      const std::size_t idx = std::min(c_->zi_[q] + (nt - view.step), c_->m_ - 1);
      double add = view.dt * view.drift[idx];
      for (std::size_t j = 0; j < view.vol_cols.size(); ++j)
        add += view.vol_cols[j][idx] * view.dW[j];
      if (!c_->comp_.empty()) add -= view.dt * c_->comp_[idx];
      for (const auto& jc : view.jump_curves) add += jc[idx];
      acc_[q] += add;
      if (view.step + 1 == nt) x_[q] = post[c_->zi_[q]];
    }
  }

  void end_path(std::size_t, PathStatus status) override {
    c_->valid_[p_] = status == PathStatus::ok ? 1 : 0;
    if (status != PathStatus::ok) return;
    for (std::size_t q = 0; q < acc_.size(); ++q)
      c_->gap_[p_ * acc_.size() + q] = x_[q] - acc_[q];
  }

 private:
  MildCollector* c_;
  std::size_t p_;
  std::vector<double> acc_, x_;
};

std::unique_ptr<PathObserver> MildCollector::make_observer(std::size_t path_index) {
  return std::make_unique<MildObserver>(this, path_index);
}

MildResidualResult mild_residual(const ModelSpec& spec, const SimConfig& cfg,
                                 std::span<const MildProbe> probes) {
  MildCollector coll(spec, cfg, probes);
  Collector* cols[] = {&coll};
  simulate(spec, cfg, cols);

  MildResidualResult r;
  r.probes.assign(probes.begin(), probes.end());
  for (std::size_t q = 0; q < probes.size(); ++q) {
    MeanVar mv;
    for (std::size_t p = 0; p < coll.valid_.size(); ++p)
      if (coll.valid_[p]) mv.add(coll.gap_[p * probes.size() + q]);
    const double h0_shift =
        spec.h0.values[std::min(coll.zi_[q] + coll.nt_[q], coll.m_ - 1)];
    const Estimate e{mv.mean - h0_shift, mv.se()};
    r.residuals.push_back(e);
    r.max_abs = std::max(r.max_abs, std::abs(e.value));
    r.max_se = std::max(r.max_se, e.se);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Measure-change consistency

GirsanovReport girsanov_consistency(const ModelSpec& spec, const SimConfig& cfg_real,
                                    const GirsanovOptions& opts) {
  if (cfg_real.measure != Measure::real_world)
    throw StructuralError("girsanov_consistency: the base run must use the real-world measure");

  DensityCollector dc(spec, cfg_real, opts.stop_levels);
  TerminalFunctionalCollector tp(spec, cfg_real);
  Collector* p_cols[] = {&dc, &tp};
  simulate(spec, cfg_real, p_cols);

  SimConfig cfg_q = cfg_real;
  cfg_q.measure = Measure::risk_neutral;
  cfg_q.seed = cfg_real.seed ^ opts.q_seed_salt;
  TerminalFunctionalCollector tq(spec, cfg_q);
  Collector* q_cols[] = {&tq};
  simulate(spec, cfg_q, q_cols);

  GirsanovReport rep;
  rep.n_p = dc.valid.size();
  rep.n_q = tq.valid.size();
  rep.excluded_p = rep.n_p - dc.n_valid();
  rep.excluded_q =
      static_cast<std::size_t>(std::count(tq.valid.begin(), tq.valid.end(), 0));

  rep.z_mean = dc.z_mean();
  rep.z_ok = std::abs(rep.z_mean.value - 1.0) <= 3.0 * rep.z_mean.se;

  const std::size_t n_fn = TerminalFunctionalCollector::names().size();
  std::vector<double> col(rep.n_p);
  for (std::size_t f = 0; f < n_fn; ++f) {
    for (std::size_t p = 0; p < rep.n_p; ++p) col[p] = tp.values[p * n_fn + f];
    FunctionalAgreement fa;
    fa.name = TerminalFunctionalCollector::names()[f];
    fa.reweighted_p = reweighted_mean(dc.z_terminal, col, dc.valid);
    MeanVar mv;
    for (std::size_t p = 0; p < rep.n_q; ++p)
      if (tq.valid[p]) mv.add(tq.values[p * n_fn + f]);
    fa.direct_q = {mv.mean, mv.se()};
    const double se =
        std::sqrt(fa.reweighted_p.se * fa.reweighted_p.se + fa.direct_q.se * fa.direct_q.se);
    const double diff = std::abs(fa.reweighted_p.value - fa.direct_q.value);
    fa.diff_se_units = se > 0 ? diff / se : (diff > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    const double allow = opts.dt_allowance_coeff * cfg_real.dt * (1.0 + std::abs(fa.direct_q.value));
    fa.ok = diff <= 3.0 * se + allow;
    rep.functionals.push_back(std::move(fa));
  }

  for (std::size_t i = 0; i < dc.stop_levels().size(); ++i) {
    GirsanovReport::Stopped s;
    s.level = dc.stop_levels()[i];
    s.z_mean = dc.stopped_z_mean(i);
    s.fraction_stopped = dc.stopped_fraction(i);
    s.ok = std::abs(s.z_mean.value - 1.0) <= 3.0 * s.z_mean.se;
    rep.stopped.push_back(s);
  }

  rep.ess = dc.ess();
  rep.ess_floor = opts.ess_floor_fraction * static_cast<double>(dc.n_valid());
  rep.min_z = 1.0;
  for (std::size_t p = 0; p < rep.n_p; ++p)
    if (dc.valid[p]) rep.min_z = std::min(rep.min_z, dc.min_z[p]);

  bool all_ok = rep.z_ok;
  for (const auto& fa : rep.functionals) all_ok = all_ok && fa.ok;
  for (const auto& s : rep.stopped) all_ok = all_ok && s.ok;
  if (rep.ess < rep.ess_floor)
    rep.outcome = CheckOutcome::inconclusive;
  else
    rep.outcome = all_ok ? CheckOutcome::passed : CheckOutcome::failed;
  return rep;
}

}  // namespace hjmm
