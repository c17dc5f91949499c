#include "hjmm/experiment.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "hjmm/errors.hpp"
#include "hjmm/io.hpp"
#include "hjmm/report.hpp"
#include "hjmm/stats.hpp"

namespace hjmm {

namespace {

using nlohmann::json;

std::string join_path(const std::string& dir, const std::string& name) {
  return dir + "/" + name;
}

json estimate_json(const Estimate& e) {
  return {{"value", e.value}, {"se", e.se}};
}

/// Ensemble time-series statistics: short rate, beta-norm, and the running
/// money-market discount at every step.  Per-path slots are written from
/// worker threads (disjoint rows); the reduction runs serially in path order
/// so results are independent of the thread count.
class StatsCollector : public Collector {
 public:
  StatsCollector(const ModelSpec& spec, const SimConfig& cfg)
      : dt_(cfg.dt), n_slots_(cfg.n_steps() + 1), n_paths_(cfg.n_paths), valid_(cfg.n_paths, 1),
        rate_(cfg.n_paths * n_slots_), norm_(cfg.n_paths * n_slots_),
        disc_(cfg.n_paths * n_slots_) {
    times_.resize(n_slots_);
    for (std::size_t k = 0; k < n_slots_; ++k) times_[k] = static_cast<double>(k) * dt_;
    (void)spec;
  }

  std::unique_ptr<PathObserver> make_observer(std::size_t path) override;

  std::size_t n_valid() const {
    std::size_t n = 0;
    for (char v : valid_) n += v != 0;
    return n;
  }

  /// Column layout of the ensemble summary CSV.
  std::vector<SeriesColumn> columns() const {
    std::vector<SeriesColumn> cols(7);
    cols[0] = {"time", times_};
    const char* names[] = {"mean_short_rate", "sd_short_rate", "mean_norm",
                           "sd_norm",         "mean_discount", "sd_discount"};
    for (int c = 0; c < 6; ++c) cols[c + 1].name = names[c];
    for (std::size_t k = 0; k < n_slots_; ++k) {
      MeanVar r, n, d;
      for (std::size_t p = 0; p < n_paths_; ++p) {
        if (!valid_[p]) continue;
        r.add(rate_[p * n_slots_ + k]);
        n.add(norm_[p * n_slots_ + k]);
        d.add(disc_[p * n_slots_ + k]);
      }
      cols[1].values.push_back(r.mean);
      cols[2].values.push_back(r.sd());
      cols[3].values.push_back(n.mean);
      cols[4].values.push_back(n.sd());
      cols[5].values.push_back(d.mean);
      cols[6].values.push_back(d.sd());
    }
    return cols;
  }

 private:
  friend class StatsObserver;
  double dt_;
  std::size_t n_slots_, n_paths_;
  std::vector<double> times_;
  std::vector<char> valid_;
  std::vector<double> rate_, norm_, disc_;
};

class StatsObserver : public PathObserver {
 public:
  StatsObserver(StatsCollector* c, std::size_t path) : c_(c), base_(path * c->n_slots_) {}

  void begin_path(std::size_t, std::span<const double> h0, double h0_norm) override {
    c_->rate_[base_] = h0[0];
    c_->norm_[base_] = h0_norm;
    c_->disc_[base_] = 1.0;
  }
  void on_step(const StepView& v, std::span<const double> post, double post_norm) override {
    sr_sum_ += v.pre[0];
    const std::size_t slot = base_ + v.step + 1;
    c_->rate_[slot] = post[0];
    c_->norm_[slot] = post_norm;
    c_->disc_[slot] = std::exp(-v.dt * sr_sum_);
  }
  void end_path(std::size_t path, PathStatus status) override {
    c_->valid_[path] = status == PathStatus::ok ? 1 : 0;
  }

 private:
  StatsCollector* c_;
  std::size_t base_;
  double sr_sum_ = 0.0;
};

std::unique_ptr<PathObserver> StatsCollector::make_observer(std::size_t path) {
  return std::make_unique<StatsObserver>(this, path);
}

struct StepResult {
  int code = exit_code::ok;
  json results;
  std::vector<std::string> files;
};

std::string config_comment(const ExperimentConfig& cfg) {
  // One-line echo for CSV headers (the pretty echo lives in config_echo.json).
  return "config: " + json::parse(canonical_config_json(cfg)).dump();
}

StepResult do_simulate(const ExperimentConfig& cfg) {
  StepResult out;
  const ModelSpec spec = model_from_config(cfg);
  SimConfig sim = cfg.sim;
  if (cfg.jump_log_paths > 0) sim.store_jump_logs = true;
  if (cfg.terminal_curves && sim.record_stride == 0) sim.record_stride = sim.n_steps();

  StatsCollector stats(spec, sim);
  Collector* cols[] = {&stats};
  const SimResult res = simulate(spec, sim, cols);

  const std::string series = join_path(cfg.out_dir, "ensemble_summary.csv");
  write_series_csv(series, {"run: simulate", config_comment(cfg)}, stats.columns());
  out.files.push_back(series);

  if (cfg.terminal_curves && !res.recorded.empty()) {
    std::vector<SeriesColumn> cc(1 + res.recorded.size());
    cc[0] = {"maturity", spec.grid->points()};
    for (std::size_t p = 0; p < res.recorded.size(); ++p) {
      cc[p + 1].name = "path_" + std::to_string(p);
      cc[p + 1].values = res.recorded[p].back().values;
    }
    const std::string path = join_path(cfg.out_dir, "terminal_curves.csv");
    write_series_csv(path, {"run: simulate (terminal curves)", config_comment(cfg)}, cc);
    out.files.push_back(path);
  }
  for (std::size_t p = 0; p < std::min<std::size_t>(cfg.jump_log_paths, res.jump_logs.size()); ++p) {
    const std::string path = join_path(cfg.out_dir, "jump_log_" + std::to_string(p) + ".csv");
    write_jump_log_csv(path, res.jump_logs[p]);
    out.files.push_back(path);
  }

  MeanVar jumps;
  for (const auto& p : res.paths) jumps.add(static_cast<double>(p.n_jumps));
  const double blow_frac =
      static_cast<double>(res.n_blowups) / static_cast<double>(std::max<std::uint64_t>(1, sim.n_paths));
  out.results = {{"n_paths", sim.n_paths},
                 {"n_steps", sim.n_steps()},
                 {"n_blowups", res.n_blowups},
                 {"blowup_fraction", blow_frac},
                 {"mean_jumps_per_path", jumps.mean},
                 {"measure", sim.measure == Measure::risk_neutral ? "risk_neutral" : "real_world"}};
  if (blow_frac > sim.max_blowup_fraction) out.code = exit_code::blow_up;
  return out;
}

StepResult do_check(const ExperimentConfig& cfg) {
  StepResult out;
  const ModelSpec spec = model_from_config(cfg);
  const CheckReport rep =
      run_all_checks(spec, cfg.bounds, cfg.check_pairs, cfg.check_samples,
                     check_settings_from_config(cfg));

  const std::string txt = join_path(cfg.out_dir, "check_report.txt");
  const std::string js = join_path(cfg.out_dir, "check_report.json");
  write_text_file(txt, rep.to_text());
  write_text_file(js, rep.to_json());
  out.files = {txt, js};
  out.results = json::parse(rep.to_json());
  const bool any_failed =
      std::any_of(rep.items.begin(), rep.items.end(),
                  [](const CheckItem& it) { return it.outcome == CheckOutcome::failed; });
  out.code = any_failed ? exit_code::failure : exit_code::ok;
  return out;
}

StepResult do_martingale(const ExperimentConfig& cfg) {
  StepResult out;
  SimConfig sim = cfg.sim;
  sim.measure = Measure::risk_neutral;  // the property under test lives under Q
  const ModelFactory factory = [&cfg](double dz) { return model_from_config_at(cfg, dz); };
  BondTestOptions opts;
  opts.n_monitors = cfg.n_monitors;
  opts.calibration_paths = cfg.calibration_paths;
  const auto results = martingale_test(factory, sim, cfg.maturities, opts);

  std::string txt = "discounted-bond martingale test\n";
  json items = json::array();
  bool all_pass = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    all_pass = all_pass && r.passed;
    std::vector<SeriesColumn> cc(5);
    cc[0] = {"time", r.times};
    cc[1].name = "estimate";
    cc[2].name = "se";
    cc[3].name = "deviation";
    cc[4].name = "allowance";
    for (std::size_t k = 0; k < r.estimates.size(); ++k) {
      cc[1].values.push_back(r.estimates[k].value);
      cc[2].values.push_back(r.estimates[k].se);
      cc[3].values.push_back(r.estimates[k].value - r.d0);
      cc[4].values.push_back(3.0 * r.estimates[k].se + r.allowance_c * sim.dt);
    }
    const std::string path = join_path(cfg.out_dir, "bond_martingale_" + std::to_string(i) + ".csv");
    write_series_csv(path,
                     {"run: martingale-test", "maturity=" + format_double(r.maturity) +
                                                  " d0=" + format_double(r.d0), config_comment(cfg)},
                     cc);
    out.files.push_back(path);

    txt += std::string(r.passed ? "[PASS]" : "[FAIL]") + " maturity " + format_double(r.maturity) +
           "  D0=" + format_double(r.d0) + "  max|dev|/SE=" + format_double(r.max_dev_se) +
           "  C=" + format_double(r.allowance_c) + "  excluded=" + std::to_string(r.n_excluded) +
           "\n";
    items.push_back({{"maturity", r.maturity},
                     {"d0", r.d0},
                     {"passed", r.passed},
                     {"max_dev_se", r.max_dev_se},
                     {"allowance_c", r.allowance_c},
                     {"n_excluded", r.n_excluded}});
  }
  txt += std::string("overall: ") + (all_pass ? "passed" : "failed") + "\n";
  const std::string rp = join_path(cfg.out_dir, "martingale_report.txt");
  write_text_file(rp, txt);
  out.files.push_back(rp);
  out.results = {{"maturities", items}, {"passed", all_pass}};
  out.code = all_pass ? exit_code::ok : exit_code::failure;
  return out;
}

StepResult do_girsanov(const ExperimentConfig& cfg) {
  StepResult out;
  SimConfig sim = cfg.sim;
  sim.measure = Measure::real_world;  // reweighting starts from a P ensemble
  const ModelSpec spec = model_from_config(cfg);
  GirsanovOptions opts;
  opts.stop_levels = cfg.girsanov_levels;
  opts.ess_floor_fraction = cfg.ess_floor_fraction;
  opts.dt_allowance_coeff = cfg.dt_allowance_coeff;
  const GirsanovReport rep = girsanov_consistency(spec, sim, opts);

  std::string csv = "# run: girsanov-test\n# " + config_comment(cfg) +
                    "\nfunctional,reweighted_p,reweighted_se,direct_q,direct_se,diff_se_units,ok\n";
  for (const auto& f : rep.functionals)
    csv += f.name + "," + format_double(f.reweighted_p.value) + "," +
           format_double(f.reweighted_p.se) + "," + format_double(f.direct_q.value) + "," +
           format_double(f.direct_q.se) + "," + format_double(f.diff_se_units) + "," +
           (f.ok ? "1" : "0") + "\n";
  const std::string fcsv = join_path(cfg.out_dir, "girsanov_functionals.csv");
  write_text_file(fcsv, csv);
  out.files.push_back(fcsv);

  std::string txt = "measure-change consistency test\n";
  txt += "E[Z_T] = " + format_double(rep.z_mean.value) + " (se " + format_double(rep.z_mean.se) +
         ") " + (rep.z_ok ? "[ok]" : "[off]") + "\n";
  for (const auto& s : rep.stopped)
    txt += "E[Z_stop@" + std::to_string(s.level) + "] = " + format_double(s.z_mean.value) +
           " (se " + format_double(s.z_mean.se) + "), stopped fraction " +
           format_double(s.fraction_stopped) + " " + (s.ok ? "[ok]" : "[off]") + "\n";
  for (const auto& f : rep.functionals)
    txt += std::string(f.ok ? "[ok]  " : "[off] ") + f.name + ": reweighted " +
           format_double(f.reweighted_p.value) + " vs direct " + format_double(f.direct_q.value) +
           " (" + format_double(f.diff_se_units) + " se units)\n";
  txt += "ESS " + format_double(rep.ess) + " (floor " + format_double(rep.ess_floor) + "), min Z " +
         format_double(rep.min_z) + "\n";
  txt += std::string("overall: ") + to_string(rep.outcome) + "\n";
  const std::string rp = join_path(cfg.out_dir, "girsanov_report.txt");
  write_text_file(rp, txt);
  out.files.push_back(rp);

  json fs = json::array();
  for (const auto& f : rep.functionals)
    fs.push_back({{"name", f.name},
                  {"reweighted_p", estimate_json(f.reweighted_p)},
                  {"direct_q", estimate_json(f.direct_q)},
                  {"diff_se_units", f.diff_se_units},
                  {"ok", f.ok}});
  json stopped = json::array();
  for (const auto& s : rep.stopped)
    stopped.push_back({{"level", s.level},
                       {"z_mean", estimate_json(s.z_mean)},
                       {"fraction_stopped", s.fraction_stopped},
                       {"ok", s.ok}});
  out.results = {{"z_mean", estimate_json(rep.z_mean)},
                 {"z_ok", rep.z_ok},
                 {"functionals", fs},
                 {"stopped", stopped},
                 {"ess", rep.ess},
                 {"ess_floor", rep.ess_floor},
                 {"min_z", rep.min_z},
                 {"outcome", to_string(rep.outcome)}};
  out.code = rep.outcome == CheckOutcome::failed ? exit_code::failure : exit_code::ok;
  return out;
}

StepResult do_positivity(const ExperimentConfig& cfg) {
  StepResult out;
  const ModelSpec spec = model_from_config(cfg);
  const PositivityResult res =
      positivity_test(spec, cfg.sim, cfg.positivity_threshold, cfg.positivity_probes);

  std::string txt = "ensemble positivity scan\n";
  txt += std::string(res.passed ? "[PASS]" : "[FAIL]") + " negative fraction " +
         format_double(res.fraction_negative) + " over " + std::to_string(res.n_samples) +
         " samples (threshold " + format_double(res.threshold) + "), worst value " +
         format_double(res.worst_value) + ", excluded paths " + std::to_string(res.n_excluded) +
         "\n";
  json probes = json::array();
  if (!res.probes.empty()) {
    std::vector<SeriesColumn> cc(4);
    cc[0].name = "t";
    cc[1].name = "z";
    cc[2].name = "negative_fraction";
    cc[3].name = "se";
    for (const auto& p : res.probes) {
      cc[0].values.push_back(p.t);
      cc[1].values.push_back(p.z);
      cc[2].values.push_back(p.negative_fraction.value);
      cc[3].values.push_back(p.negative_fraction.se);
      probes.push_back({{"t", p.t},
                        {"z", p.z},
                        {"negative_fraction", estimate_json(p.negative_fraction)}});
      txt += "probe t=" + format_double(p.t) + " z=" + format_double(p.z) + ": fraction " +
             format_double(p.negative_fraction.value) + " (se " +
             format_double(p.negative_fraction.se) + ")\n";
    }
    const std::string pcsv = join_path(cfg.out_dir, "positivity_probes.csv");
    write_series_csv(pcsv, {"run: positivity-test", config_comment(cfg)}, cc);
    out.files.push_back(pcsv);
  }
  const std::string rp = join_path(cfg.out_dir, "positivity_report.txt");
  write_text_file(rp, txt);
  out.files.push_back(rp);

  out.results = {{"fraction_negative", res.fraction_negative},
                 {"n_samples", res.n_samples},
                 {"worst_value", res.worst_value},
                 {"threshold", res.threshold},
                 {"passed", res.passed},
                 {"n_excluded", res.n_excluded},
                 {"probes", probes}};
  out.code = res.passed ? exit_code::ok : exit_code::failure;
  return out;
}

/// Shared wrapper: echo the config, run the steps, write run_summary.json.
int run_command(const ExperimentConfig& cfg, const std::string& command,
                std::span<const std::pair<std::string, StepResult (*)(const ExperimentConfig&)>> steps) {
  ensure_directory(cfg.out_dir);
  const std::string echo_path = join_path(cfg.out_dir, "config_echo.json");
  write_text_file(echo_path, canonical_config_json(cfg));

  json step_results = json::object();
  std::vector<std::string> files{echo_path};
  int code = exit_code::ok;
  for (const auto& [name, fn] : steps) {
    StepResult r = fn(cfg);
    step_results[name] = std::move(r.results);
    files.insert(files.end(), r.files.begin(), r.files.end());
    code = std::max(code, r.code);
  }

  const std::string summary_path = join_path(cfg.out_dir, "run_summary.json");
  files.push_back(summary_path);
  const json summary = {{"command", command},
                        {"exit_code", code},
                        {"config", json::parse(canonical_config_json(cfg))},
                        {"results", step_results},
                        {"files", files}};
  write_text_file(summary_path, summary.dump(2) + "\n");
  return code;
}

using Step = std::pair<std::string, StepResult (*)(const ExperimentConfig&)>;

}  // namespace

int run_simulate(const ExperimentConfig& cfg) {
  const Step steps[] = {{"simulate", &do_simulate}};
  return run_command(cfg, "simulate", steps);
}

int run_check(const ExperimentConfig& cfg) {
  const Step steps[] = {{"check", &do_check}};
  return run_command(cfg, "check", steps);
}

int run_martingale_test(const ExperimentConfig& cfg) {
  const Step steps[] = {{"martingale_test", &do_martingale}};
  return run_command(cfg, "martingale-test", steps);
}

int run_girsanov_test(const ExperimentConfig& cfg) {
  const Step steps[] = {{"girsanov_test", &do_girsanov}};
  return run_command(cfg, "girsanov-test", steps);
}

int run_positivity_test(const ExperimentConfig& cfg) {
  const Step steps[] = {{"positivity_test", &do_positivity}};
  return run_command(cfg, "positivity-test", steps);
}

int run_all(const ExperimentConfig& cfg) {
  const Step steps[] = {{"check", &do_check},
                        {"simulate", &do_simulate},
                        {"martingale_test", &do_martingale},
                        {"girsanov_test", &do_girsanov},
                        {"positivity_test", &do_positivity}};
  return run_command(cfg, "all", steps);
}

}  // namespace hjmm
