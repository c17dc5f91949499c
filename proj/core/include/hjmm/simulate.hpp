#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "hjmm/errors.hpp"
#include "hjmm/model.hpp"

namespace hjmm {

enum class Measure { risk_neutral, real_world };

enum class PathStatus { ok, blew_up };

struct SimConfig {
  double horizon = 1.0;
  double dt = 0.02;  // must equal the maturity grid step (transport is an index shift)
  std::uint64_t n_paths = 1;
  std::uint64_t first_path = 0;  // random streams are keyed by first_path + local index,
                                 // so any sub-range of an ensemble can be replayed exactly
  Measure measure = Measure::risk_neutral;
  std::uint64_t seed = 1;
  int threads = 1;
  std::size_t record_stride = 0;  // 0: store no curves; k: store every k-th step (plus t=0 and T)
  bool store_jump_logs = false;
  double blowup_norm = 1e6;          // a path blows up when ||X||_beta exceeds this or goes non-finite
  double max_blowup_fraction = 0.0;  // threshold for the run to count as failed (experiment layer)

  void validate(const ModelSpec& spec) const;
  std::size_t n_steps() const;
};

/// Raised by code that cannot proceed past blown-up paths (simulate() itself
/// never throws this: it reports counts and lets callers decide).
struct BlowUpError : Error {
  std::size_t n_blowups = 0;
  std::uint64_t n_paths = 0;
  BlowUpError(const std::string& what, std::size_t blowups, std::uint64_t paths)
      : Error(what), n_blowups(blowups), n_paths(paths) {}
};

/// Read-only view of one engine step, passed to observers.  Spans point into
/// engine workspace and are valid only during the call.
struct StepView {
  std::size_t step = 0;  // state being advanced lives at t = step * dt
  double t = 0.0;
  double dt = 0.0;
  std::span<const double> pre;    // pre-step curve values
  double pre_norm = 0.0;          // ||pre||_beta
  std::span<const double> drift;  // drift values used in this step
  std::span<const std::span<const double>> vol_cols;
  std::span<const double> dW;
  // Jumps applied during this step: evaluated field curves and mark indices
  // into the path's jump log.
  std::span<const std::span<const double>> jump_curves;
  std::span<const std::size_t> jump_indices;
  const JumpLog* jumps = nullptr;  // full path log (times/marks)
};

/// Per-path observer.  The engine creates observers through a Collector so
/// multi-threaded runs never share mutable observer state between paths.
class PathObserver {
 public:
  virtual ~PathObserver() = default;
  virtual void begin_path(std::size_t /*path*/, std::span<const double> /*h0*/, double /*h0_norm*/) {}
  virtual void on_step(const StepView& /*view*/, std::span<const double> /*post*/, double /*post_norm*/) {}
  virtual void end_path(std::size_t /*path*/, PathStatus /*status*/) {}
};

/// Factory + serial reduction.  make_observer may be called from worker
/// threads but only with distinct path indices; finalize runs single-threaded
/// after the ensemble completes (reductions must happen there, in path order,
/// so results are independent of the thread count).
class Collector {
 public:
  virtual ~Collector() = default;
  virtual std::unique_ptr<PathObserver> make_observer(std::size_t path_index) = 0;
  virtual void finalize(const struct SimResult& /*result*/) {}
};

struct PathSummary {
  PathStatus status = PathStatus::ok;
  std::size_t blowup_step = 0;  // valid when status == blew_up
  double terminal_norm = 0.0;
  std::uint32_t n_jumps = 0;
};

struct SimResult {
  SimConfig cfg;
  std::vector<PathSummary> paths;
  std::size_t n_blowups = 0;
  std::vector<double> record_times;                 // shared by all paths (record_stride > 0)
  std::vector<std::vector<ForwardCurve>> recorded;  // [path][time index]
  std::vector<JumpLog> jump_logs;                   // cfg.store_jump_logs
  double wall_seconds = 0.0;
};

/// Run the ensemble.  Reproducibility contract: results are a deterministic
/// function of (spec, cfg.seed, cfg.n_paths, cfg.dt, cfg.horizon, measure)
/// and bitwise independent of cfg.threads.
SimResult simulate(const ModelSpec& spec, const SimConfig& cfg,
                   std::span<Collector* const> collectors = {});

/// One step of the scheme starting from h: exact transport by one grid cell,
/// then explicit drift/diffusion/jump increments, all coefficient fields
/// evaluated at the pre-step curve.  `jump_marks` lists the marks of the
/// jumps arriving during the step.  This is the same routine the engine runs
/// (engine output over one step is bitwise equal).
ForwardCurve step_curve(const ModelSpec& spec, Measure measure, const ForwardCurve& h,
                        std::span<const double> dW,
                        std::span<const std::vector<double>> jump_marks, double dt);

}  // namespace hjmm
