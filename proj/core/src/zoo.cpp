#include "hjmm/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "hjmm/errors.hpp"

namespace hjmm {

namespace {

std::vector<double> clamped_shape(const CurveGrid& grid, double kappa) {
  std::vector<double> e(grid.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::exp(-kappa * grid.point(i));
  e.back() = 0.0;  // vanishing tail
  return e;
}

VolField make_vol(const VolParams& p, const GridPtr& grid, double beta, int factors) {
  VolField f;
  f.factors = factors;
  if (p.family == "ho_lee") {
    // Flat at sigma until plateau * z_max, linear taper to 0 at the midpoint
    // of [plateau * z_max, z_max], then 0.
    const double z0 = p.plateau * grid->z_max();
    const double z1 = 0.5 * (z0 + grid->z_max());
    auto shapes = std::make_shared<std::vector<std::vector<double>>>();
    for (int j = 0; j < factors; ++j) {
      const double s = p.sigma / static_cast<double>(j + 1);
      std::vector<double> v(grid->size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double z = grid->point(i);
        v[i] = z <= z0 ? s : (z >= z1 ? 0.0 : s * (z1 - z) / (z1 - z0));
      }
      v.back() = 0.0;
      shapes->push_back(std::move(v));
    }
    f.state_dependent = false;
    f.column = [shapes](const ForwardCurve&, int j, std::vector<double>& out) {
      out = (*shapes)[static_cast<std::size_t>(j)];
    };
  } else if (p.family == "hull_white") {
    auto shapes = std::make_shared<std::vector<std::vector<double>>>();
    for (int j = 0; j < factors; ++j) {
      auto v = clamped_shape(*grid, p.kappa * static_cast<double>(j + 1));
      for (auto& x : v) x *= p.sigma;
      shapes->push_back(std::move(v));
    }
    f.state_dependent = false;
    f.column = [shapes](const ForwardCurve&, int j, std::vector<double>& out) {
      out = (*shapes)[static_cast<std::size_t>(j)];
    };
  } else if (p.family == "capped_proportional") {
    auto shapes = std::make_shared<std::vector<std::vector<double>>>();
    for (int j = 0; j < factors; ++j)
      shapes->push_back(clamped_shape(*grid, p.kappa * static_cast<double>(j + 1)));
    auto metric = std::make_shared<BetaMetric>(grid, beta);
    const double sigma = p.sigma, cap = p.cap;
    f.state_dependent = true;
    f.column = [shapes, metric, sigma, cap](const ForwardCurve& h, int j, std::vector<double>& out) {
      const double scale = sigma * std::min(metric->norm(std::span<const double>(h.values)), cap);
      const auto& base = (*shapes)[static_cast<std::size_t>(j)];
      out.resize(base.size());
      for (std::size_t i = 0; i < base.size(); ++i) out[i] = scale * base[i];
    };
  } else if (p.family == "pointwise_proportional") {
    auto shapes = std::make_shared<std::vector<std::vector<double>>>();
    for (int j = 0; j < factors; ++j) {
      auto v = clamped_shape(*grid, p.kappa * static_cast<double>(j + 1));
      for (auto& x : v) x *= p.sigma;
      shapes->push_back(std::move(v));
    }
    f.state_dependent = true;
    f.column = [shapes](const ForwardCurve& h, int j, std::vector<double>& out) {
      const auto& base = (*shapes)[static_cast<std::size_t>(j)];
      out.resize(base.size());
      for (std::size_t i = 0; i < base.size(); ++i) out[i] = h.values[i] * base[i];
    };
  } else {
    throw ConfigError("unknown volatility family '" + p.family + "'", "model.vol.family");
  }
  return f;
}

MarkMeasure make_marks(const JumpParams& p) {
  MarkMeasure m;
  m.dim = 1;
  if (p.family == "none" || p.intensity == 0.0) return m;
  if (!(p.intensity > 0)) throw ConfigError("jump intensity must be >= 0", "model.jumps.intensity");
  m.total_mass = p.intensity;
  if (p.marks == "point") {
    if (!(p.mark_size > 0)) throw ConfigError("mark size must be positive", "model.jumps.mark_size");
    m.weights = {p.intensity};
    m.atoms = {p.mark_size};
    m.description = "point(" + std::to_string(p.mark_size) + ")";
  } else if (p.marks == "trunc_exp") {
    const double mean = p.mark_size, cap = p.mark_cap;
    if (!(mean > 0) || !(cap > mean)) throw ConfigError("trunc_exp needs 0 < mean < cap", "model.jumps");
    m.sampler = [mean, cap](RandomSource& rs, std::span<double> out) {
      const double u = rs.uniform01();
      out[0] = -mean * std::log1p(-u * (1.0 - std::exp(-cap / mean)));
    };
    m.description = "trunc_exp(mean=" + std::to_string(mean) + ",cap=" + std::to_string(cap) + ")";
  } else {
    throw ConfigError("unknown mark distribution '" + p.marks + "'", "model.jumps.marks");
  }
  return m;
}

JumpField make_jump_field(const JumpParams& p, const GridPtr& grid, MarkMeasure measure) {
  JumpField f;
  f.measure = std::move(measure);
  if (!f.has_jumps()) {
    f.state_dependent = false;
    return f;
  }
  auto shape = std::make_shared<std::vector<double>>(clamped_shape(*grid, 1.0));
  if (p.family == "exp_jump") {
    f.state_dependent = false;
    f.gamma = [shape](const ForwardCurve&, std::span<const double> x, std::vector<double>& out) {
      out.resize(shape->size());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = -x[0] * (*shape)[i];
    };
    f.d_gamma = [shape](const ForwardCurve&, std::span<const double> x, std::vector<double>& out) {
      // d/dz of -x e^{-z} is +x e^{-z}; keep the clamped tail for consistency.
      out.resize(shape->size());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[0] * (*shape)[i];
    };
  } else if (p.family == "pointwise_exp_jump") {
    f.state_dependent = true;
    f.gamma = [shape](const ForwardCurve& h, std::span<const double> x, std::vector<double>& out) {
      out.resize(shape->size());
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double hv = std::min(std::max(h.values[i], 0.0), 1.0);
        out[i] = -x[0] * hv * (*shape)[i];
      }
    };
    // No maturity derivative: it would need dh/dz.
  } else {
    throw ConfigError("unknown jump family '" + p.family + "'", "model.jumps.family");
  }
  return f;
}

std::string fingerprint_of(const ModelParams& p, const CurveGrid& grid, double beta,
                           double beta_prime, const CovarianceSpec& cov) {
  char buf[512];
  std::string eig;
  for (double l : cov.eigenvalues) {
    char e[32];
    std::snprintf(e, sizeof e, "%.9g,", l);
    eig += e;
  }
  std::snprintf(buf, sizeof buf,
                "grid=[0,%.9g]/%zu;beta=%.9g;beta_prime=%.9g;cov=[%s];"
                "vol=%s(sigma=%.9g,kappa=%.9g,cap=%.9g,plateau=%.9g);"
                "jumps=%s(intensity=%.9g,marks=%s,size=%.9g,cap=%.9g);"
                "mpr(zeta=%.9g,y=%.9g);drift=%s;h0=%.9g",
                grid.z_max(), grid.cells(), beta, beta_prime, eig.c_str(), p.vol.family.c_str(),
                p.vol.sigma, p.vol.kappa, p.vol.cap, p.vol.plateau, p.jumps.family.c_str(),
                p.jumps.intensity, p.jumps.marks.c_str(), p.jumps.mark_size, p.jumps.mark_cap,
                p.mpr.zeta_level, p.mpr.y_ratio, p.real_drift.c_str(), p.h0_flat);
  return buf;
}

}  // namespace

DriftField cache_if_static(const DriftField& field, const ForwardCurve& h0) {
  if (field.state_dependent || !field.eval) return field;
  auto cached = std::make_shared<std::vector<double>>();
  field.eval(h0, *cached);
  DriftField out;
  out.state_dependent = false;
  out.eval = [cached](const ForwardCurve&, std::vector<double>& v) { v = *cached; };
  return out;
}

DriftField risk_neutral_drift_field(const ModelSpec& spec) {
  auto base = std::make_shared<ModelSpec>(spec);
  base->real_drift = {};
  DriftField f;
  f.state_dependent = spec.vol.state_dependent || spec.rn_jumps.state_dependent;
  f.eval = [base](const ForwardCurve& h, std::vector<double>& out) {
    out = hjm_drift_xi(*base, h).values;
  };
  return cache_if_static(f, spec.h0);
}

ModelSpec build_model(const ModelParams& params, GridPtr grid, double beta, double beta_prime,
                      CovarianceSpec cov, MarkMcSettings mark_mc) {
  cov.validate();
  ModelSpec spec;
  spec.grid = grid;
  spec.beta = beta;
  spec.beta_prime = beta_prime;
  spec.cov = cov;
  spec.mark_mc = mark_mc;
  spec.vol = make_vol(params.vol, grid, beta, cov.dim());

  auto rn_measure = make_marks(params.jumps);
  spec.rn_jumps = make_jump_field(params.jumps, grid, rn_measure);
  if (!(params.mpr.y_ratio > 0)) throw ConfigError("y_ratio must be positive", "model.mpr.y_ratio");
  if (spec.rn_jumps.has_jumps()) {
    spec.real_jumps = make_jump_field(params.jumps, grid, rn_measure.scaled(1.0 / params.mpr.y_ratio));
  }

  spec.mpr.y_is_constant = true;
  spec.mpr.y_constant = params.mpr.y_ratio;
  if (params.mpr.zeta_level != 0.0) {
    const double level = params.mpr.zeta_level;
    const std::size_t n = grid->size();
    spec.mpr.zeta_state_dependent = false;
    spec.mpr.zeta = [level, n](const ForwardCurve&, std::vector<double>& out) {
      out.assign(n, level);
    };
  }

  if (!params.h0_values.empty()) {
    if (params.h0_values.size() != grid->size())
      throw ConfigError("h0 values must match the grid size", "model.h0_values");
    spec.h0 = ForwardCurve{grid, beta, params.h0_values, params.h0_values.back() == 0.0};
  } else {
    spec.h0 = constant_curve(grid, beta, params.h0_flat);
  }

  if (params.real_drift == "mpre") {
    spec.real_drift = cache_if_static(drift_from_mpre(spec), spec.h0);
  } else if (params.real_drift == "classical") {
    auto base = std::make_shared<ModelSpec>(spec);
    base->real_drift = {};
    DriftField f;
    f.state_dependent = spec.vol.state_dependent || spec.mpr.zeta_state_dependent;
    f.eval = [base](const ForwardCurve& h, std::vector<double>& out) {
      out = classical_real_drift(*base, h).values;
    };
    spec.real_drift = cache_if_static(f, spec.h0);
  } else {
    throw ConfigError("unknown real drift rule '" + params.real_drift + "'", "model.real_drift");
  }

  spec.fingerprint = fingerprint_of(params, *grid, beta, beta_prime, cov);
  spec.validate();
  return spec;
}

}  // namespace hjmm
