#include "hjmm/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hjmm/errors.hpp"

namespace hjmm {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(what, path);
}

/// Typed view into one JSON object that records which keys were read and
/// reports the ones that were not (typo protection: unknown keys are errors,
/// not silently ignored).
struct Section {
  const json* j = nullptr;  // null: section absent, all defaults apply
  std::string path;
  mutable std::set<std::string> seen;

  bool has(const char* key) const { return j && j->contains(key); }

  template <class T>
  void get(const char* key, T& out) const {
    if (!has(key)) return;
    seen.insert(key);
    try {
      out = j->at(key).get<T>();
    } catch (const json::exception&) {
      fail(path + "." + key, "wrong type");
    }
  }

  Section sub(const char* key) const {
    seen.insert(key);
    if (!has(key)) return {nullptr, path + "." + key, {}};
    const json& s = j->at(key);
    if (!s.is_object()) fail(path + "." + key, "expected an object");
    return {&s, path + "." + key, {}};
  }

  void finish() const {
    if (!j) return;
    for (auto it = j->begin(); it != j->end(); ++it)
      if (!seen.count(it.key())) fail(path + "." + it.key(), "unknown key");
  }
};

bool near_integer(double x, double* rounded = nullptr) {
  const double r = std::round(x);
  if (rounded) *rounded = r;
  return std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x));
}

Measure measure_from_string(const std::string& s, const std::string& path) {
  if (s == "risk_neutral") return Measure::risk_neutral;
  if (s == "real_world") return Measure::real_world;
  fail(path, "expected \"risk_neutral\" or \"real_world\"");
}

const char* measure_to_string(Measure m) {
  return m == Measure::risk_neutral ? "risk_neutral" : "real_world";
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("not valid JSON: ") + e.what(), source);
  }
  if (!root.is_object()) throw ConfigError("top level must be an object", source);

  ExperimentConfig cfg;
  Section top{&root, source, {}};

  {
    Section model = top.sub("model");
    Section vol = model.sub("vol");
    vol.get("family", cfg.model.vol.family);
    vol.get("sigma", cfg.model.vol.sigma);
    vol.get("kappa", cfg.model.vol.kappa);
    vol.get("cap", cfg.model.vol.cap);
    vol.get("plateau", cfg.model.vol.plateau);
    vol.finish();

    Section jumps = model.sub("jumps");
    jumps.get("family", cfg.model.jumps.family);
    jumps.get("intensity", cfg.model.jumps.intensity);
    jumps.get("marks", cfg.model.jumps.marks);
    jumps.get("mark_size", cfg.model.jumps.mark_size);
    jumps.get("mark_cap", cfg.model.jumps.mark_cap);
    jumps.finish();

    Section mpr = model.sub("mpr");
    mpr.get("zeta_level", cfg.model.mpr.zeta_level);
    mpr.get("y_ratio", cfg.model.mpr.y_ratio);
    mpr.finish();

    Section mc = model.sub("mark_mc");
    mc.get("n_samples", cfg.mark_mc.n_samples);
    mc.get("seed", cfg.mark_mc.seed);
    mc.get("rel_tol", cfg.mark_mc.rel_tol);
    mc.finish();

    model.get("real_drift", cfg.model.real_drift);
    model.get("h0_flat", cfg.model.h0_flat);
    model.get("h0_values", cfg.model.h0_values);
    model.get("z_max", cfg.z_max);
    model.get("beta", cfg.beta);
    model.get("beta_prime", cfg.beta_prime);
    model.get("cov_eigenvalues", cfg.cov_eigenvalues);
    model.finish();
  }

  {
    Section sim = top.sub("simulation");
    sim.get("horizon", cfg.sim.horizon);
    sim.get("dt", cfg.sim.dt);
    sim.get("n_paths", cfg.sim.n_paths);
    sim.get("seed", cfg.sim.seed);
    sim.get("threads", cfg.sim.threads);
    sim.get("record_stride", cfg.sim.record_stride);
    sim.get("store_jump_logs", cfg.sim.store_jump_logs);
    sim.get("blowup_norm", cfg.sim.blowup_norm);
    sim.get("max_blowup_fraction", cfg.sim.max_blowup_fraction);
    if (sim.has("measure")) {
      std::string m;
      sim.get("measure", m);
      cfg.sim.measure = measure_from_string(m, sim.path + ".measure");
    }
    sim.finish();
  }

  {
    Section check = top.sub("check");
    check.get("lipschitz_rn", cfg.bounds.lipschitz_rn);
    check.get("growth_rn", cfg.bounds.growth_rn);
    check.get("lipschitz_real", cfg.bounds.lipschitz_real);
    check.get("radius", cfg.check.radius);
    check.get("seed", cfg.check.seed);
    check.get("positivity_tol", cfg.check.positivity_tol);
    check.get("identity_tol", cfg.check.identity_tol);
    check.get("mpre_tol", cfg.check.mpre_tol);
    check.get("identity_scale", cfg.check.identity_scale);
    check.get("fd_step_rel", cfg.check.fd_step_rel);
    check.get("mark_nodes", cfg.check.mark_nodes);
    check.get("n_pairs", cfg.check_pairs);
    check.get("n_samples", cfg.check_samples);
    Section phi = check.sub("phi");
    phi.get("kind", cfg.phi_kind);
    phi.get("coeff", cfg.phi_coeff);
    phi.finish();
    check.finish();
  }

  {
    Section diag = top.sub("diagnostics");
    diag.get("maturities", cfg.maturities);
    diag.get("n_monitors", cfg.n_monitors);
    diag.get("calibration_paths", cfg.calibration_paths);
    diag.get("positivity_threshold", cfg.positivity_threshold);
    if (diag.has("positivity_probes")) {
      std::vector<std::array<double, 2>> probes;
      diag.get("positivity_probes", probes);
      cfg.positivity_probes.clear();
      for (const auto& p : probes) cfg.positivity_probes.emplace_back(p[0], p[1]);
    }
    diag.get("girsanov_levels", cfg.girsanov_levels);
    diag.get("ess_floor_fraction", cfg.ess_floor_fraction);
    diag.get("dt_allowance_coeff", cfg.dt_allowance_coeff);
    diag.finish();
  }

  {
    Section out = top.sub("output");
    out.get("directory", cfg.out_dir);
    out.get("terminal_curves", cfg.terminal_curves);
    out.get("jump_log_paths", cfg.jump_log_paths);
    out.finish();
  }

  top.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str(), path);
}

void ExperimentConfig::validate() const {
  if (!(sim.dt > 0.0)) fail("simulation.dt", "must be positive");
  if (!(sim.horizon > 0.0)) fail("simulation.horizon", "must be positive");
  if (!(z_max > 0.0)) fail("model.z_max", "must be positive");
  if (sim.n_paths == 0) fail("simulation.n_paths", "must be at least 1");
  if (sim.threads < 1) fail("simulation.threads", "must be at least 1");
  if (!(beta > 0.0)) fail("model.beta", "must be positive");
  if (!(beta_prime >= beta)) fail("model.beta_prime", "must be >= model.beta");
  if (cov_eigenvalues.empty()) fail("model.cov_eigenvalues", "must be non-empty");
  for (double l : cov_eigenvalues)
    if (!(l > 0.0)) fail("model.cov_eigenvalues", "eigenvalues must be positive");

  if (!near_integer(sim.horizon / sim.dt))
    fail("simulation.dt", "does not divide simulation.horizon");
  if (!near_integer(z_max / sim.dt))
    fail("model.z_max", "not an integer multiple of simulation.dt (the grid step)");

  for (double m : maturities) {
    if (!near_integer(m / sim.dt))
      fail("diagnostics.maturities", "maturity is not on the time grid (multiple of dt)");
    if (m < sim.horizon)
      fail("diagnostics.maturities", "bond maturities must be >= simulation.horizon");
    if (m > z_max) fail("diagnostics.maturities", "maturity exceeds model.z_max");
  }
  for (const auto& [t, z] : positivity_probes) {
    if (t < 0.0 || t > sim.horizon) fail("diagnostics.positivity_probes", "probe time outside [0, horizon]");
    if (z < 0.0 || z > z_max) fail("diagnostics.positivity_probes", "probe maturity outside [0, z_max]");
  }
  for (int l : girsanov_levels)
    if (l <= 0) fail("diagnostics.girsanov_levels", "levels must be positive");
  if (!(ess_floor_fraction > 0.0 && ess_floor_fraction < 1.0))
    fail("diagnostics.ess_floor_fraction", "must lie in (0, 1)");
  if (n_monitors == 0) fail("diagnostics.n_monitors", "must be at least 1");

  if (phi_kind != "zero" && phi_kind != "linear")
    fail("check.phi.kind", "expected \"zero\" or \"linear\"");
  if (check_pairs == 0) fail("check.n_pairs", "must be at least 1");
  if (check_samples == 0) fail("check.n_samples", "must be at least 1");
  if (!(check.radius > 0.0)) fail("check.radius", "must be positive");
  if (out_dir.empty()) fail("output.directory", "must not be empty");
}

std::string canonical_config_json(const ExperimentConfig& cfg) {
  json probes = json::array();
  for (const auto& [t, z] : cfg.positivity_probes) probes.push_back({t, z});
  const json root = {
      {"model",
       {{"vol",
         {{"family", cfg.model.vol.family},
          {"sigma", cfg.model.vol.sigma},
          {"kappa", cfg.model.vol.kappa},
          {"cap", cfg.model.vol.cap},
          {"plateau", cfg.model.vol.plateau}}},
        {"jumps",
         {{"family", cfg.model.jumps.family},
          {"intensity", cfg.model.jumps.intensity},
          {"marks", cfg.model.jumps.marks},
          {"mark_size", cfg.model.jumps.mark_size},
          {"mark_cap", cfg.model.jumps.mark_cap}}},
        {"mpr", {{"zeta_level", cfg.model.mpr.zeta_level}, {"y_ratio", cfg.model.mpr.y_ratio}}},
        {"mark_mc",
         {{"n_samples", cfg.mark_mc.n_samples},
          {"seed", cfg.mark_mc.seed},
          {"rel_tol", cfg.mark_mc.rel_tol}}},
        {"real_drift", cfg.model.real_drift},
        {"h0_flat", cfg.model.h0_flat},
        {"h0_values", cfg.model.h0_values},
        {"z_max", cfg.z_max},
        {"beta", cfg.beta},
        {"beta_prime", cfg.beta_prime},
        {"cov_eigenvalues", cfg.cov_eigenvalues}}},
      {"simulation",
       {{"horizon", cfg.sim.horizon},
        {"dt", cfg.sim.dt},
        {"n_paths", cfg.sim.n_paths},
        {"seed", cfg.sim.seed},
        {"threads", cfg.sim.threads},
        {"measure", measure_to_string(cfg.sim.measure)},
        {"record_stride", cfg.sim.record_stride},
        {"store_jump_logs", cfg.sim.store_jump_logs},
        {"blowup_norm", cfg.sim.blowup_norm},
        {"max_blowup_fraction", cfg.sim.max_blowup_fraction}}},
      {"check",
       {{"lipschitz_rn", cfg.bounds.lipschitz_rn},
        {"growth_rn", cfg.bounds.growth_rn},
        {"lipschitz_real", cfg.bounds.lipschitz_real},
        {"radius", cfg.check.radius},
        {"seed", cfg.check.seed},
        {"positivity_tol", cfg.check.positivity_tol},
        {"identity_tol", cfg.check.identity_tol},
        {"mpre_tol", cfg.check.mpre_tol},
        {"identity_scale", cfg.check.identity_scale},
        {"fd_step_rel", cfg.check.fd_step_rel},
        {"mark_nodes", cfg.check.mark_nodes},
        {"n_pairs", cfg.check_pairs},
        {"n_samples", cfg.check_samples},
        {"phi", {{"kind", cfg.phi_kind}, {"coeff", cfg.phi_coeff}}}}},
      {"diagnostics",
       {{"maturities", cfg.maturities},
        {"n_monitors", cfg.n_monitors},
        {"calibration_paths", cfg.calibration_paths},
        {"positivity_threshold", cfg.positivity_threshold},
        {"positivity_probes", probes},
        {"girsanov_levels", cfg.girsanov_levels},
        {"ess_floor_fraction", cfg.ess_floor_fraction},
        {"dt_allowance_coeff", cfg.dt_allowance_coeff}}},
      {"output",
       {{"directory", cfg.out_dir},
        {"terminal_curves", cfg.terminal_curves},
        {"jump_log_paths", cfg.jump_log_paths}}}};
  return root.dump(2) + "\n";
}

ModelSpec model_from_config_at(const ExperimentConfig& cfg, double dz) {
  double cells = 0.0;
  if (!near_integer(cfg.z_max / dz, &cells))
    fail("model.z_max", "not an integer multiple of the grid step");
  try {
    return build_model(cfg.model, CurveGrid::uniform(dz, static_cast<std::size_t>(cells)),
                       cfg.beta, cfg.beta_prime, CovarianceSpec{cfg.cov_eigenvalues}, cfg.mark_mc);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what(), "model");
  }
}

ModelSpec model_from_config(const ExperimentConfig& cfg) {
  return model_from_config_at(cfg, cfg.sim.dt);
}

CheckSettings check_settings_from_config(const ExperimentConfig& cfg) {
  CheckSettings st = cfg.check;
  if (cfg.phi_kind == "linear") {
    const double c = cfg.phi_coeff;
    st.phi = [c](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += std::abs(v);
      return c * s;
    };
  } else {
    st.phi = nullptr;
  }
  return st;
}

}  // namespace hjmm
