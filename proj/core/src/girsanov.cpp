#include "hjmm/girsanov.hpp"

#include <algorithm>
#include <cmath>

namespace hjmm {

namespace {

// int (Y(h, gamma(h,y)) - 1) F(dy) for the general (state-dependent) case.
double jump_comp_general(const ModelSpec& spec, const ForwardCurve& h) {
  if (!spec.real_jumps.has_jumps()) return 0.0;
  double acc = 0.0;
  std::vector<double> g;
  ForwardCurve jc;
  jc.grid = spec.grid;
  jc.beta = spec.beta_prime;
  for_each_quadrature_mark(spec.real_jumps.measure, spec.mark_mc,
                           [&](double w, std::span<const double> x) {
                             spec.real_jumps.gamma(h, x, g);
                             jc.values = g;
                             const double y = spec.mpr.eval_y(h, jc);
                             if (!(y > 0.0)) throw DomainError("jump intensity ratio Y must be positive");
                             acc += w * (y - 1.0);
                           });
  return acc;
}

}  // namespace

DensityCollector::DensityCollector(const ModelSpec& spec, const SimConfig& cfg,
                                   std::vector<int> stop_levels, std::size_t n_monitors)
    : spec_(&spec), cfg_(cfg), levels_(std::move(stop_levels)) {
  if (cfg.measure != Measure::real_world)
    throw StructuralError("density accumulation runs along real-world paths");
  int prev = 0;
  for (int l : levels_) {
    if (l <= prev) throw StructuralError("stop levels must be increasing positive integers");
    prev = l;
  }
  const std::size_t n = cfg.n_steps();
  if (n_monitors > n) n_monitors = n;
  for (std::size_t i = 1; i <= n_monitors; ++i) {
    const std::size_t step = i * n / n_monitors;  // last monitor = final step
    if (monitor_steps_.empty() || step != monitor_steps_.back()) {
      monitor_steps_.push_back(step);
      monitor_times_.push_back(static_cast<double>(step) * cfg.dt);
    }
  }
  metric_ = std::make_shared<BetaMetric>(spec.grid, spec.beta);

  const std::size_t np = cfg.n_paths;
  z_terminal.assign(np, 0.0);
  log_z_monitors.assign(np * monitor_steps_.size(), 0.0);
  stopped_z.assign(np * levels_.size(), 0.0);
  stopped_early.assign(np * levels_.size(), 0);
  min_z.assign(np, 1.0);
  valid.assign(np, 0);

  zeta_static_.assign(spec.grid->size(), 0.0);
  if (spec.mpr.zeta && !spec.mpr.zeta_state_dependent) spec.mpr.zeta(spec.h0, zeta_static_);
  const bool zeta_dynamic = spec.mpr.zeta && spec.mpr.zeta_state_dependent;

  if (!spec.vol.state_dependent && !zeta_dynamic) {
    static_inner_ = true;
    inner_static_.resize(static_cast<std::size_t>(spec.vol.factors));
    std::vector<double> col;
    for (int j = 0; j < spec.vol.factors; ++j) {
      spec.vol.column(spec.h0, j, col);
      inner_static_[static_cast<std::size_t>(j)] =
          metric_->inner(col, std::span<const double>(zeta_static_));
    }
  }
  if (!spec.real_jumps.has_jumps()) {
    static_jump_comp_ = true;
    jump_comp_static_ = 0.0;
  } else if (spec.mpr.y_is_constant && !spec.real_jumps.state_dependent) {
    static_jump_comp_ = true;
    jump_comp_static_ = spec.real_jumps.measure.total_mass * (spec.mpr.y_constant - 1.0);
  }
}

class DensityObserver final : public PathObserver {
 public:
  DensityObserver(DensityCollector* c, std::size_t p) : c_(c), p_(p) {
    level_done_.assign(c->stop_levels().size(), 0);
  }

  void begin_path(std::size_t, std::span<const double>, double h0_norm) override {
    log_z_ = 0.0;
    min_z_ = 1.0;
    mon_ptr_ = 0;
    check_levels(0.0, h0_norm);
  }

  void on_step(const StepView& v, std::span<const double>, double post_norm) override {
    const auto& spec = *c_->spec_;
    // Diffusion part: <c_j(X_pre), zeta(X_pre)> per factor.
    double inc = 0.0;
    const auto nj = v.vol_cols.size();
    for (std::size_t j = 0; j < nj; ++j) {
      double ip;
      if (c_->static_inner_) {
        ip = c_->inner_static_[j];
      } else {
        if (spec.mpr.zeta_state_dependent) {
          ForwardCurve pre{spec.grid, spec.beta, {v.pre.begin(), v.pre.end()}, false};
          spec.mpr.zeta(pre, zeta_buf_);
        } else {
          zeta_buf_ = c_->zeta_static_;
        }
        ip = c_->metric_->inner(v.vol_cols[j], zeta_buf_);
      }
      const double lj = spec.cov.eigenvalues[j];
      inc += ip * v.dW[j] - 0.5 * lj * ip * ip * v.dt;
    }
    // Jump part.
    if (spec.real_jumps.has_jumps()) {
      const double comp = c_->static_jump_comp_
                              ? c_->jump_comp_static_
                              : [&] {
                                  ForwardCurve pre{spec.grid, spec.beta,
                                                   {v.pre.begin(), v.pre.end()}, false};
                                  return jump_comp_general(spec, pre);
                                }();
      inc -= v.dt * comp;
      for (std::size_t q = 0; q < v.jump_curves.size(); ++q) {
        double y;
        if (spec.mpr.y_is_constant) {
          y = spec.mpr.y_constant;
        } else {
          ForwardCurve pre{spec.grid, spec.beta, {v.pre.begin(), v.pre.end()}, false};
          ForwardCurve jc{spec.grid, spec.beta_prime,
                          {v.jump_curves[q].begin(), v.jump_curves[q].end()}, false};
          y = spec.mpr.y(pre, jc);
        }
        if (!(y > 0.0)) throw DomainError("jump intensity ratio Y must be positive");
        inc += std::log(y);
      }
    }
    log_z_ += inc;
    min_z_ = std::min(min_z_, std::exp(log_z_));
    const double t_post = static_cast<double>(v.step + 1) * v.dt;
    if (mon_ptr_ < c_->monitor_steps_.size() && v.step + 1 == c_->monitor_steps_[mon_ptr_]) {
      c_->log_z_monitors[p_ * c_->monitor_steps_.size() + mon_ptr_] = log_z_;
      ++mon_ptr_;
    }
    check_levels(t_post, post_norm);
  }

  void end_path(std::size_t, PathStatus s) override {
    if (s != PathStatus::ok) return;  // slot stays invalid
    auto* c = c_;
    const auto& lv = c->stop_levels();
    for (std::size_t l = 0; l < lv.size(); ++l) {
      // Not stopped before T: the stopped value is Z_T.
      if (!level_done_[l]) c->stopped_z[p_ * lv.size() + l] = std::exp(log_z_);
    }
    c->z_terminal[p_] = std::exp(log_z_);
    c->min_z[p_] = min_z_;
    c->valid[p_] = 1;
  }

 private:
  void check_levels(double t, double norm) {
    const auto& lv = c_->stop_levels();
    const double horizon = c_->cfg_.horizon;
    for (std::size_t l = 0; l < lv.size(); ++l) {
      if (level_done_[l]) continue;
      const auto level = static_cast<double>(lv[l]);
      // tau = first grid time with ||X|| >= level, capped at min(level, T).
      if (norm >= level || t >= std::min(level, horizon) - 1e-12) {
        if (t < horizon - 1e-12) {
          c_->stopped_z[p_ * lv.size() + l] = std::exp(log_z_);
          c_->stopped_early[p_ * lv.size() + l] = 1;
          level_done_[l] = 1;
        }
        // At t == T the end_path handler records Z_T.
      }
    }
  }

  DensityCollector* c_;
  std::size_t p_;
  double log_z_ = 0.0;
  double min_z_ = 1.0;
  std::size_t mon_ptr_ = 0;
  std::vector<char> level_done_;
  std::vector<double> zeta_buf_;
};

std::unique_ptr<PathObserver> DensityCollector::make_observer(std::size_t path_index) {
  return std::make_unique<DensityObserver>(this, path_index);
}

Estimate DensityCollector::z_mean() const {
  MeanVar mv;
  for (std::size_t p = 0; p < z_terminal.size(); ++p)
    if (valid[p]) mv.add(z_terminal[p]);
  return {mv.mean, mv.se()};
}

Estimate DensityCollector::stopped_z_mean(std::size_t level_idx) const {
  MeanVar mv;
  for (std::size_t p = 0; p < valid.size(); ++p)
    if (valid[p]) mv.add(stopped_z[p * levels_.size() + level_idx]);
  return {mv.mean, mv.se()};
}

double DensityCollector::stopped_fraction(std::size_t level_idx) const {
  std::size_t n = 0, hit = 0;
  for (std::size_t p = 0; p < valid.size(); ++p)
    if (valid[p]) {
      ++n;
      hit += stopped_early[p * levels_.size() + level_idx] ? 1u : 0u;
    }
  return n ? static_cast<double>(hit) / static_cast<double>(n) : 0.0;
}

double DensityCollector::ess() const {
  std::vector<double> w;
  w.reserve(z_terminal.size());
  for (std::size_t p = 0; p < z_terminal.size(); ++p)
    if (valid[p]) w.push_back(z_terminal[p]);
  return effective_sample_size(w);
}

std::size_t DensityCollector::n_valid() const {
  std::size_t n = 0;
  for (char v : valid) n += v ? 1 : 0;
  return n;
}

DensityPath density_along_path(const ModelSpec& spec, const SimConfig& cfg,
                               std::uint64_t path_index, std::vector<int> stop_levels) {
  SimConfig one = cfg;
  one.first_path = path_index;
  one.n_paths = 1;
  one.threads = 1;
  one.record_stride = 0;
  one.store_jump_logs = false;
  const std::size_t n = one.n_steps();
  DensityCollector dc(spec, one, std::move(stop_levels), n);  // monitor every step
  Collector* cols[] = {&dc};
  simulate(spec, one, cols);

  DensityPath out;
  out.times.push_back(0.0);
  out.log_z.push_back(0.0);
  for (std::size_t i = 0; i < dc.monitor_times().size(); ++i) {
    out.times.push_back(dc.monitor_times()[i]);
    out.log_z.push_back(dc.log_z_monitors[i]);
  }
  out.valid = dc.valid[0] != 0;
  out.z_terminal = dc.z_terminal[0];
  out.stopped_z.assign(dc.stopped_z.begin(), dc.stopped_z.end());
  out.stopped_early.assign(dc.stopped_early.begin(), dc.stopped_early.end());
  return out;
}

Estimate reweighted_mean(std::span<const double> z, std::span<const double> g,
                         std::span<const char> valid) {
  if (z.size() != g.size() || z.size() != valid.size())
    throw StructuralError("reweighted_mean: size mismatch");
  MeanVar mv;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (valid[i]) mv.add(z[i] * g[i]);
  return {mv.mean, mv.se()};
}

namespace {
const std::vector<std::string> kFunctionalNames{"short_rate", "point_1y", "bond_2y", "norm_sq",
                                                "exp_neg_norm"};
}

TerminalFunctionalCollector::TerminalFunctionalCollector(const ModelSpec& spec,
                                                         const SimConfig& cfg)
    : spec_(&spec), n_steps_(cfg.n_steps()) {
  metric_ = std::make_shared<BetaMetric>(spec.grid, spec.beta);
  values.assign(cfg.n_paths * names().size(), 0.0);
  valid.assign(cfg.n_paths, 0);
  idx_1y_ = spec.grid->index_of(std::min(1.0, spec.grid->z_max()));
  idx_2y_ = spec.grid->index_of(std::min(2.0, spec.grid->z_max()));
}

const std::vector<std::string>& TerminalFunctionalCollector::names() { return kFunctionalNames; }

class TerminalFunctionalObserver final : public PathObserver {
 public:
  TerminalFunctionalObserver(TerminalFunctionalCollector* c, std::size_t p) : c_(c), p_(p) {}

  void on_step(const StepView& v, std::span<const double> post, double post_norm) override {
    if (v.step + 1 != c_->n_steps_) return;
    const auto& grid = *c_->spec_->grid;
    const auto& pts = grid.points();
    // Trapezoid integral of the terminal curve over [0, 2] (or to z_max).
    double integral = 0.0;
    for (std::size_t i = 0; i < c_->idx_2y_; ++i)
      integral += 0.5 * (post[i] + post[i + 1]) * (pts[i + 1] - pts[i]);
    auto* slot = c_->values.data() + p_ * TerminalFunctionalCollector::names().size();
    slot[0] = post[0];
    slot[1] = post[c_->idx_1y_];
    slot[2] = std::exp(-integral);
    slot[3] = post_norm * post_norm;
    slot[4] = std::exp(-post_norm * post_norm);
  }
  void end_path(std::size_t p, PathStatus s) override { c_->valid[p] = (s == PathStatus::ok); }

 private:
  TerminalFunctionalCollector* c_;
  std::size_t p_;
};

std::unique_ptr<PathObserver> TerminalFunctionalCollector::make_observer(std::size_t path_index) {
  return std::make_unique<TerminalFunctionalObserver>(this, path_index);
}

}  // namespace hjmm
