#include <doctest.h>

#include <cmath>

#include "hjmm/errors.hpp"
#include "hjmm/girsanov.hpp"
#include "hjmm/zoo.hpp"

using namespace hjmm;

namespace {

constexpr double kBeta = 0.5;
constexpr double kBetaPrime = 1.0;

ModelSpec make_model(const ModelParams& p, double dz = 0.02, std::size_t cells = 100) {
  return build_model(p, CurveGrid::uniform(dz, cells), kBeta, kBetaPrime, CovarianceSpec{{1.0}});
}

SimConfig real_cfg(double horizon, double dt, std::uint64_t n_paths, std::uint64_t seed) {
  SimConfig cfg;
  cfg.horizon = horizon;
  cfg.dt = dt;
  cfg.n_paths = n_paths;
  cfg.measure = Measure::real_world;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("density along diffusion-only paths matches the closed form") {
  // Exponential vol sigma e^{-kappa z} and a flat curve zeta: the inner
  // product <c, zeta> is exactly sigma * zeta_level, so per path
  //   log Z_T = <c,zeta> W_T - 1/2 <c,zeta>^2 T.
  const double sigma = 0.01, zeta = 0.5, dt = 0.02;
  ModelParams p;
  p.vol = {"hull_white", sigma, 0.5, 10.0, 0.5};
  p.mpr.zeta_level = zeta;
  const auto spec = make_model(p);
  const auto cfg = real_cfg(0.5, dt, 20000, 99);
  const std::size_t n = cfg.n_steps();

  DensityCollector dc(spec, cfg, {});
  Collector* cols[] = {&dc};
  simulate(spec, cfg, cols);
  REQUIRE(dc.n_valid() == cfg.n_paths);

  const double ip = sigma * zeta;
  for (std::uint64_t path : {0ull, 1ull, 2ull, 777ull, 19999ull}) {
    const auto inc = brownian_increments(spec.cov, n, dt,
                                         StreamKey{cfg.seed, path, substream::brownian});
    double lz = 0.0;
    for (std::size_t k = 0; k < n; ++k) lz += ip * inc[k] - 0.5 * ip * ip * dt;
    CHECK(dc.z_terminal[path] == doctest::Approx(std::exp(lz)).epsilon(1e-12));
  }

  const auto zm = dc.z_mean();
  CHECK(std::abs(zm.value - 1.0) <= 5.0 * zm.se);
  CHECK(zm.se < 0.01);

  // The last monitor is the final step, so its density is the terminal one.
  const std::size_t n_mon = dc.monitor_times().size();
  CHECK(dc.monitor_times().back() == doctest::Approx(cfg.horizon));
  CHECK(dc.z_terminal[5] == std::exp(dc.log_z_monitors[5 * n_mon + n_mon - 1]));
}

TEST_CASE("density along jump-only paths matches the counting-process law") {
  // Zero vol, point marks, constant intensity ratio y: per path
  //   log Z_T = N_T log y - lambda_P (y - 1) T,
  // with N_T read off the stored jump log.
  const double y = 2.0, dt = 0.02;
  ModelParams p;
  p.vol = {"hull_white", 0.0, 0.5, 10.0, 0.5};
  p.jumps = {"exp_jump", 2.0, "point", 0.01, 0.05};  // risk-neutral intensity 2
  p.mpr.y_ratio = y;                                 // real-world intensity 1
  const auto spec = make_model(p);
  CHECK(spec.real_jumps.measure.total_mass == doctest::Approx(1.0));

  auto cfg = real_cfg(1.0, dt, 20000, 1234);
  cfg.store_jump_logs = true;
  const std::size_t n = cfg.n_steps();

  DensityCollector dc(spec, cfg, {});
  Collector* cols[] = {&dc};
  auto res = simulate(spec, cfg, cols);
  REQUIRE(dc.n_valid() == cfg.n_paths);

  const double comp = spec.real_jumps.measure.total_mass * (y - 1.0);
  for (std::size_t path : {0u, 3u, 41u, 19999u}) {
    double lz = 0.0;
    for (std::size_t k = 0; k < n; ++k) lz -= dt * comp;
    lz += static_cast<double>(res.jump_logs[path].count()) * std::log(y);
    CHECK(dc.z_terminal[path] == doctest::Approx(std::exp(lz)).epsilon(1e-12));
  }

  const auto zm = dc.z_mean();
  CHECK(std::abs(zm.value - 1.0) <= 5.0 * zm.se);
  // Effective sample size shrinks under the moment-generating weight spread
  // but stays a sizable fraction of the ensemble at these parameters.
  CHECK(dc.ess() > 0.2 * static_cast<double>(cfg.n_paths));
  CHECK(dc.ess() < static_cast<double>(cfg.n_paths));
}

TEST_CASE("stopped density is a martingale at every level") {
  // Big vol on a norm-1/2 initial curve so the level-1 ball is actually hit
  // on a fraction of paths before T.
  ModelParams p;
  p.vol = {"hull_white", 0.3, 0.5, 10.0, 0.5};
  p.mpr.zeta_level = 0.3;
  p.h0_flat = 0.5;
  const auto spec = make_model(p);
  const auto cfg = real_cfg(1.0, 0.02, 4000, 7);

  DensityCollector dc(spec, cfg, {1, 2});
  Collector* cols[] = {&dc};
  simulate(spec, cfg, cols);
  REQUIRE(dc.n_valid() == cfg.n_paths);

  const double f1 = dc.stopped_fraction(0);
  const double f2 = dc.stopped_fraction(1);
  CHECK(f1 > 0.0);
  CHECK(f1 < 1.0);
  CHECK(f2 <= f1);

  for (std::size_t l = 0; l < 2; ++l) {
    const auto sm = dc.stopped_z_mean(l);
    INFO("level ", dc.stop_levels()[l]);
    CHECK(std::abs(sm.value - 1.0) <= 5.0 * sm.se);
  }
  // Unstopped mean-one martingale property holds as well.
  const auto zm = dc.z_mean();
  CHECK(std::abs(zm.value - 1.0) <= 5.0 * zm.se);
  double min_z = 1.0;
  for (std::size_t q = 0; q < cfg.n_paths; ++q) min_z = std::min(min_z, dc.min_z[q]);
  CHECK(min_z > 0.0);
  CHECK(min_z < 1.0);
}

TEST_CASE("single-path replay reproduces the ensemble density bitwise") {
  ModelParams p;
  p.vol = {"hull_white", 0.02, 0.5, 10.0, 0.5};
  p.jumps = {"exp_jump", 1.0, "point", 0.01, 0.05};
  p.mpr.zeta_level = 0.4;
  p.mpr.y_ratio = 1.5;
  const auto spec = make_model(p, 0.05, 50);
  const auto cfg = real_cfg(1.0, 0.05, 50, 31);

  DensityCollector dc(spec, cfg, {1, 2});
  Collector* cols[] = {&dc};
  simulate(spec, cfg, cols);

  const auto& mon = dc.monitor_times();
  for (std::uint64_t path : {0ull, 7ull, 49ull}) {
    const auto dp = density_along_path(spec, cfg, path, {1, 2});
    REQUIRE(dp.valid);
    CHECK(dp.z_terminal == dc.z_terminal[path]);
    for (std::size_t l = 0; l < 2; ++l) {
      CHECK(dp.stopped_z[l] == dc.stopped_z[path * 2 + l]);
      CHECK(dp.stopped_early[l] == dc.stopped_early[path * 2 + l]);
    }
    // dp.log_z is indexed by step; compare at the ensemble monitor steps.
    for (std::size_t k = 0; k < mon.size(); ++k) {
      const std::size_t step = spec.grid->steps_for(mon[k]);
      CHECK(dp.log_z[step] == dc.log_z_monitors[path * mon.size() + k]);
    }
  }
}

TEST_CASE("terminal functionals match the recorded curve") {
  ModelParams p;
  p.vol = {"hull_white", 0.02, 0.5, 10.0, 0.5};
  p.jumps = {"exp_jump", 1.0, "point", 0.01, 0.05};
  const auto spec = make_model(p, 0.02, 150);  // [0, 3]
  SimConfig cfg = real_cfg(1.0, 0.02, 20, 5);
  cfg.measure = Measure::risk_neutral;
  cfg.record_stride = cfg.n_steps();  // keep t=0 and T only

  TerminalFunctionalCollector tf(spec, cfg);
  Collector* cols[] = {&tf};
  auto res = simulate(spec, cfg, cols);

  const BetaMetric metric(spec.grid, spec.beta);
  const auto i1 = spec.grid->index_of(1.0);
  const auto i2 = spec.grid->index_of(2.0);
  const double dz = spec.grid->uniform_step();
  for (std::size_t path : {0u, 13u}) {
    const auto& final_curve = res.recorded[path].back();
    auto vals = tf.of_path(path);
    CHECK(vals[0] == final_curve.values[0]);
    CHECK(vals[1] == final_curve.values[i1]);
    double integral = 0.0;
    for (std::size_t i = 0; i < i2; ++i)
      integral += 0.5 * (final_curve.values[i] + final_curve.values[i + 1]) * dz;
    CHECK(vals[2] == doctest::Approx(std::exp(-integral)).epsilon(1e-12));
    CHECK(vals[3] == doctest::Approx(metric.norm_sq(final_curve.values)).epsilon(1e-12));
    CHECK(vals[4] == doctest::Approx(std::exp(-vals[3])).epsilon(1e-12));
  }
}

TEST_CASE("reweighted mean validates its inputs") {
  const std::vector<double> z{2.0, 0.0, 1.0};
  const std::vector<double> g{1.0, 5.0, 1.0};
  const std::vector<char> valid{1, 1, 1};
  const auto est = reweighted_mean(z, g, valid);
  CHECK(est.value == doctest::Approx(1.0));
  const std::vector<double> short_g{1.0};
  CHECK_THROWS_AS(reweighted_mean(z, short_g, valid), StructuralError);

  ModelParams p;
  p.vol = {"hull_white", 0.01, 0.5, 10.0, 0.5};
  const auto spec = make_model(p);
  SimConfig cfg = real_cfg(0.5, 0.02, 10, 1);
  SimConfig rn = cfg;
  rn.measure = Measure::risk_neutral;
  CHECK_THROWS_AS(DensityCollector(spec, rn, {}), StructuralError);
  CHECK_THROWS_AS(DensityCollector(spec, cfg, {2, 2}), StructuralError);
  CHECK_THROWS_AS(DensityCollector(spec, cfg, {-1}), StructuralError);
}
