#include "hjmm/simulate.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include "hjmm/zoo.hpp"

namespace hjmm {

void SimConfig::validate(const ModelSpec& spec) const {
  const double dz = spec.grid->uniform_step();  // throws on non-uniform grids
  if (std::abs(dt - dz) > 1e-12 * dz)
    throw ConfigError("time step must equal the maturity grid step (transport is an index shift)",
                      "sim.dt");
  if (!(horizon > 0)) throw ConfigError("horizon must be positive", "sim.horizon");
  const double ratio = horizon / dt;
  if (std::abs(ratio - std::llround(ratio)) > 1e-9)
    throw ConfigError("horizon must be a whole number of steps", "sim.horizon");
  if (n_paths == 0) throw ConfigError("need at least one path", "sim.n_paths");
  if (threads < 1 || threads > 256) throw ConfigError("threads must be in [1, 256]", "sim.threads");
  if (!(blowup_norm > 0)) throw ConfigError("blow-up threshold must be positive", "sim.blowup_norm");
  if (max_blowup_fraction < 0 || max_blowup_fraction > 1)
    throw ConfigError("blow-up fraction must be in [0, 1]", "sim.max_blowup_fraction");
}

std::size_t SimConfig::n_steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

namespace {

// Shared read-only data for all workers.
struct EngineShared {
  const ModelSpec& spec;
  const SimConfig& cfg;
  const JumpField& jumps;  // field for the simulated measure
  DriftField drift;
  BetaMetric metric;
  std::size_t m = 0;
  std::size_t n_steps = 0;
  bool vol_static = false;
  bool drift_static = false;
  bool comp_static = false;
  std::vector<std::vector<double>> static_cols;
  std::vector<double> static_drift;
  std::vector<double> static_comp;  // int gamma(.,y) dF(dy), fixed-field case
};

// out = transported pre + dt*drift + sum_j cols[j]*dW_j - dt*comp + jumps.
// Returns ||out||^2 in the state norm (second pass over cache-hot data).
double fused_step(std::span<const double> pre, std::span<const double> drift,
                  std::span<const std::span<const double>> cols, std::span<const double> dW,
                  std::span<const double> comp,
                  std::span<const std::span<const double>> jump_curves, double dt,
                  std::span<const double> u, std::span<double> out) {
  const std::size_t m = pre.size();
  const std::size_t nj = cols.size();
  for (std::size_t i = 0; i < m; ++i) {
    double v = pre[i + 1 < m ? i + 1 : m - 1] + dt * drift[i];
    for (std::size_t j = 0; j < nj; ++j) v += cols[j][i] * dW[j];
    out[i] = v;
  }
  if (!comp.empty())
    for (std::size_t i = 0; i < m; ++i) out[i] -= dt * comp[i];
  for (const auto& jc : jump_curves)
    for (std::size_t i = 0; i < m; ++i) out[i] += jc[i];
  double acc = out[0] * out[0];
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double dv = out[k + 1] - out[k];
    acc += dv * dv * u[k];
  }
  return acc;
}

void eval_compensator(const JumpField& jf, const MarkMcSettings& mc, const ForwardCurve& h,
                      std::vector<double>& g_scratch, std::vector<double>& out, std::size_t m) {
  out.assign(m, 0.0);
  for_each_quadrature_mark(jf.measure, mc, [&](double w, std::span<const double> x) {
    jf.gamma(h, x, g_scratch);
    for (std::size_t i = 0; i < m; ++i) out[i] += w * g_scratch[i];
  });
}

// Per-worker mutable state; reused across the worker's paths.
struct Workspace {
  ForwardCurve cur;  // wraps the current values so state-dependent fields see a curve
  std::vector<double> nxt;
  std::vector<double> inc;
  std::vector<double> drift_buf, comp_buf, g_scratch;
  std::vector<std::vector<double>> col_bufs;
  std::vector<std::vector<double>> jump_bufs;
  std::vector<std::span<const double>> col_spans;
  std::vector<std::span<const double>> jump_spans;
  std::vector<std::size_t> jump_idx;
  std::vector<std::uint32_t> jump_steps;
};

void run_path(const EngineShared& es, Workspace& w, std::size_t p, SimResult& res,
              std::span<Collector* const> collectors) {
  const auto& spec = es.spec;
  const auto& cfg = es.cfg;
  const std::size_t m = es.m;
  const double dt = cfg.dt;

  std::vector<std::unique_ptr<PathObserver>> obs;
  obs.reserve(collectors.size());
  for (auto* c : collectors) obs.push_back(c->make_observer(p));

  w.cur.values.assign(spec.h0.values.begin(), spec.h0.values.end());
  double pre_norm = es.metric.norm(std::span<const double>(w.cur.values));
  for (auto& o : obs) o->begin_path(p, w.cur.values, pre_norm);

  const std::uint64_t abs_path = cfg.first_path + p;
  brownian_increments_into(spec.cov, es.n_steps, dt,
                           StreamKey{cfg.seed, abs_path, substream::brownian}, w.inc);
  JumpLog jlog;
  if (es.jumps.has_jumps())
    jlog = sample_jumps(es.jumps.measure, cfg.horizon, StreamKey{cfg.seed, abs_path, 0});
  // Assign each jump to the step covering [k dt, (k+1) dt).
  w.jump_steps.resize(jlog.count());
  for (std::size_t i = 0; i < jlog.count(); ++i) {
    auto k = static_cast<std::size_t>(jlog.times[i] / dt);
    w.jump_steps[i] = static_cast<std::uint32_t>(k >= es.n_steps ? es.n_steps - 1 : k);
  }

  auto& rec = res.recorded;
  if (cfg.record_stride > 0) {
    rec[p].clear();
    rec[p].push_back(ForwardCurve{spec.grid, spec.beta, w.cur.values, spec.h0.tail_zero});
  }

  const std::size_t nj = static_cast<std::size_t>(spec.vol.factors);
  PathStatus status = PathStatus::ok;
  std::size_t blow_step = 0;
  std::size_t jptr = 0;

  for (std::size_t k = 0; k < es.n_steps; ++k) {
    // Coefficient fields at the pre-step curve.
    std::span<const double> drift_vals;
    if (es.drift_static) {
      drift_vals = es.static_drift;
    } else {
      es.drift.eval(w.cur, w.drift_buf);
      drift_vals = w.drift_buf;
    }
    if (es.vol_static) {
      for (std::size_t j = 0; j < nj; ++j) w.col_spans[j] = es.static_cols[j];
    } else {
      for (std::size_t j = 0; j < nj; ++j) {
        spec.vol.column(w.cur, static_cast<int>(j), w.col_bufs[j]);
        w.col_spans[j] = w.col_bufs[j];
      }
    }
    std::span<const double> comp;
    if (es.jumps.has_jumps()) {
      if (es.comp_static) {
        comp = es.static_comp;
      } else {
        eval_compensator(es.jumps, spec.mark_mc, w.cur, w.g_scratch, w.comp_buf, m);
        comp = w.comp_buf;
      }
    }
    // Jumps arriving during this step, evaluated at the pre-step curve.
    w.jump_spans.clear();
    w.jump_idx.clear();
    std::size_t nburst = 0;
    while (jptr + nburst < jlog.count() && w.jump_steps[jptr + nburst] == k) ++nburst;
    for (std::size_t q = 0; q < nburst; ++q) {
      if (w.jump_bufs.size() <= q) w.jump_bufs.emplace_back();
      es.jumps.gamma(w.cur, jlog.mark(jptr + q), w.jump_bufs[q]);
      w.jump_spans.push_back(w.jump_bufs[q]);
      w.jump_idx.push_back(jptr + q);
    }
    jptr += nburst;

    const double norm_sq =
        fused_step(w.cur.values, drift_vals, w.col_spans, {w.inc.data() + k * nj, nj}, comp,
                   w.jump_spans, dt, es.metric.cell_weights(), w.nxt);

    if (!(norm_sq <= cfg.blowup_norm * cfg.blowup_norm)) {  // catches NaN too
      status = PathStatus::blew_up;
      blow_step = k;
      break;
    }

    StepView view;
    view.step = k;
    view.t = static_cast<double>(k) * dt;
    view.dt = dt;
    view.pre = w.cur.values;
    view.pre_norm = pre_norm;
    view.drift = drift_vals;
    view.vol_cols = w.col_spans;
    view.dW = {w.inc.data() + k * nj, nj};
    view.jump_curves = w.jump_spans;
    view.jump_indices = w.jump_idx;
    view.jumps = &jlog;
    const double post_norm = std::sqrt(norm_sq);
    for (auto& o : obs) o->on_step(view, w.nxt, post_norm);

    std::swap(w.cur.values, w.nxt);
    pre_norm = post_norm;

    if (cfg.record_stride > 0 && ((k + 1) % cfg.record_stride == 0 || k + 1 == es.n_steps))
      rec[p].push_back(ForwardCurve{spec.grid, spec.beta, w.cur.values, false});
  }

  auto& summary = res.paths[p];
  summary.status = status;
  summary.blowup_step = blow_step;
  summary.terminal_norm = pre_norm;
  summary.n_jumps = static_cast<std::uint32_t>(jlog.count());
  for (auto& o : obs) o->end_path(p, status);
  if (cfg.store_jump_logs) res.jump_logs[p] = std::move(jlog);
}

}  // namespace

SimResult simulate(const ModelSpec& spec, const SimConfig& cfg,
                   std::span<Collector* const> collectors) {
  spec.validate();
  cfg.validate(spec);
  const auto t0 = std::chrono::steady_clock::now();

  const bool q = cfg.measure == Measure::risk_neutral;
  EngineShared es{spec,
                  cfg,
                  q ? spec.rn_jumps : spec.real_jumps,
                  q ? risk_neutral_drift_field(spec) : spec.real_drift,
                  BetaMetric(spec.grid, spec.beta),
                  0,
                  0,
                  false,
                  false,
                  false,
                  {},
                  {},
                  {}};
  if (!es.drift.eval) throw StructuralError("simulation needs a drift field for the chosen measure");
  es.m = spec.grid->size();
  es.n_steps = cfg.n_steps();
  es.vol_static = !spec.vol.state_dependent;
  es.drift_static = !es.drift.state_dependent;
  es.comp_static = es.jumps.has_jumps() && !es.jumps.state_dependent;

  if (es.vol_static) {
    es.static_cols.resize(static_cast<std::size_t>(spec.vol.factors));
    for (int j = 0; j < spec.vol.factors; ++j) spec.vol.column(spec.h0, j, es.static_cols[j]);
  }
  if (es.drift_static) es.drift.eval(spec.h0, es.static_drift);
  if (es.comp_static) {
    std::vector<double> scratch;
    eval_compensator(es.jumps, spec.mark_mc, spec.h0, scratch, es.static_comp, es.m);
  }

  SimResult res;
  res.cfg = cfg;
  res.paths.resize(cfg.n_paths);
  if (cfg.record_stride > 0) {
    res.recorded.resize(cfg.n_paths);
    for (std::size_t k = 0; k <= es.n_steps; ++k)
      if (k == 0 || k % cfg.record_stride == 0 || k == es.n_steps)
        res.record_times.push_back(static_cast<double>(k) * cfg.dt);
  }
  if (cfg.store_jump_logs) res.jump_logs.resize(cfg.n_paths);

  auto make_workspace = [&] {
    Workspace w;
    w.cur.grid = spec.grid;
    w.cur.beta = spec.beta;
    w.cur.values.resize(es.m);
    w.nxt.resize(es.m);
    w.col_bufs.resize(static_cast<std::size_t>(spec.vol.factors));
    w.col_spans.resize(static_cast<std::size_t>(spec.vol.factors));
    return w;
  };

  const auto n_threads =
      static_cast<std::uint64_t>(cfg.threads) < cfg.n_paths ? static_cast<std::uint64_t>(cfg.threads)
                                                            : cfg.n_paths;
  if (n_threads <= 1) {
    Workspace w = make_workspace();
    for (std::size_t p = 0; p < cfg.n_paths; ++p) run_path(es, w, p, res, collectors);
  } else {
    std::atomic<std::uint64_t> next{0};
    constexpr std::uint64_t kBlock = 64;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n_threads);
    for (std::uint64_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          Workspace w = make_workspace();
          for (;;) {
            const std::uint64_t start = next.fetch_add(kBlock);
            if (start >= cfg.n_paths) break;
            const std::uint64_t stop = std::min(start + kBlock, cfg.n_paths);
            for (std::uint64_t p = start; p < stop; ++p)
              run_path(es, w, static_cast<std::size_t>(p), res, collectors);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  for (const auto& ps : res.paths)
    if (ps.status == PathStatus::blew_up) ++res.n_blowups;
  for (auto* c : collectors) c->finalize(res);

  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

ForwardCurve step_curve(const ModelSpec& spec, Measure measure, const ForwardCurve& h,
                        std::span<const double> dW,
                        std::span<const std::vector<double>> jump_marks, double dt) {
  spec.validate();
  if (!same_grid(h.grid, spec.grid)) throw StructuralError("state curve not on model grid");
  const bool q = measure == Measure::risk_neutral;
  const JumpField& jf = q ? spec.rn_jumps : spec.real_jumps;
  const std::size_t m = spec.grid->size();

  std::vector<double> drift_vals;
  if (q) {
    drift_vals = hjm_drift_xi(spec, h).values;
  } else {
    if (!spec.real_drift.eval) throw StructuralError("model has no real-world drift field");
    spec.real_drift.eval(h, drift_vals);
  }

  const auto nj = static_cast<std::size_t>(spec.vol.factors);
  if (dW.size() != nj) throw StructuralError("dW size must equal the factor count");
  std::vector<std::vector<double>> cols(nj);
  std::vector<std::span<const double>> col_spans(nj);
  for (std::size_t j = 0; j < nj; ++j) {
    spec.vol.column(h, static_cast<int>(j), cols[j]);
    col_spans[j] = cols[j];
  }

  std::vector<double> comp;
  std::vector<std::vector<double>> jcs;
  std::vector<std::span<const double>> jspans;
  if (jf.has_jumps()) {
    std::vector<double> scratch;
    eval_compensator(jf, spec.mark_mc, h, scratch, comp, m);
    for (const auto& mark : jump_marks) {
      jcs.emplace_back();
      jf.gamma(h, mark, jcs.back());
      jspans.emplace_back(jcs.back());
    }
  } else if (!jump_marks.empty()) {
    throw StructuralError("jump marks supplied to a model without jumps");
  }

  BetaMetric metric(spec.grid, spec.beta);
  ForwardCurve out;
  out.grid = spec.grid;
  out.beta = spec.beta;
  out.values.resize(m);
  fused_step(h.values, drift_vals, col_spans, dW, comp, jspans, dt, metric.cell_weights(),
             out.values);
  return out;
}

}  // namespace hjmm
