#include "hjmm/drivers.hpp"

#include <algorithm>
#include <cmath>

#include "hjmm/errors.hpp"

namespace hjmm {

void CovarianceSpec::validate() const {
  if (eigenvalues.empty()) throw StructuralError("covariance needs at least one factor");
  double prev = eigenvalues.front();
  for (double l : eigenvalues) {
    if (!(l > 0) || !std::isfinite(l)) throw DomainError("covariance eigenvalues must be positive and finite");
    if (l > prev + 1e-15) throw DomainError("covariance eigenvalues must be nonincreasing");
    prev = l;
  }
}

double CovarianceSpec::total() const {
  double s = 0;
  for (double l : eigenvalues) s += l;
  return s;
}

void brownian_increments_into(const CovarianceSpec& cov, std::size_t n_steps, double dt,
                              const StreamKey& key, std::vector<double>& out) {
  cov.validate();
  if (!(dt > 0)) throw DomainError("dt must be positive");
  RandomSource rs(key);
  const std::size_t j = cov.eigenvalues.size();
  double sd[64];
  if (j > 64) throw StructuralError("more than 64 factors unsupported");
  for (std::size_t k = 0; k < j; ++k) sd[k] = std::sqrt(cov.eigenvalues[k] * dt);
  out.resize(n_steps * j);
  for (std::size_t s = 0; s < n_steps; ++s)
    for (std::size_t k = 0; k < j; ++k) out[s * j + k] = sd[k] * rs.normal();
}

std::vector<double> brownian_increments(const CovarianceSpec& cov, std::size_t n_steps, double dt,
                                        const StreamKey& key) {
  std::vector<double> out;
  brownian_increments_into(cov, n_steps, dt, key, out);
  return out;
}

void JumpLog::validate(double horizon) const {
  if (marks.size() != times.size() * static_cast<std::size_t>(mark_dim))
    throw StructuralError("jump log: marks/times size mismatch");
  double prev = 0.0;
  for (double t : times) {
    if (!(t > 0) || t > horizon) throw StructuralError("jump log: time outside (0, horizon]");
    if (t < prev) throw StructuralError("jump log: times not sorted");
    prev = t;
  }
  for (double m : marks)
    if (!std::isfinite(m)) throw StructuralError("jump log: non-finite mark");
}

void MarkMeasure::validate() const {
  if (dim < 1) throw StructuralError("mark dimension must be >= 1");
  if (total_mass < 0 || !std::isfinite(total_mass)) throw DomainError("total mass must be finite and >= 0");
  if (total_mass == 0.0) return;
  if (is_atomic()) {
    if (atoms.size() != weights.size() * static_cast<std::size_t>(dim))
      throw StructuralError("mark measure: atoms/weights size mismatch");
    double s = 0;
    for (double w : weights) {
      if (!(w > 0)) throw DomainError("mark measure: atom weights must be positive");
      s += w;
    }
    if (std::abs(s - total_mass) > 1e-12 * std::max(1.0, total_mass))
      throw StructuralError("mark measure: atom weights must sum to total mass");
  } else if (!sampler) {
    throw StructuralError("mark measure with mass > 0 needs atoms or a sampler");
  }
}

Estimate MarkMeasure::integrate(const std::function<double(std::span<const double>)>& g,
                                const MarkMcSettings& mc) const {
  validate();
  if (total_mass == 0.0) return {0.0, 0.0};
  if (is_atomic()) {
    double s = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * g(atom(i));
    return {s, 0.0};
  }
  RandomSource rs(StreamKey{mc.seed, 0, substream::mark_quadrature});
  MeanVar mv;
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < mc.n_samples; ++i) {
    sampler(rs, x);
    mv.add(g(x));
  }
  return {total_mass * mv.mean, total_mass * mv.se()};
}

MarkMeasure MarkMeasure::scaled(double c) const {
  if (!(c > 0)) throw DomainError("intensity scale must be positive");
  MarkMeasure out = *this;
  out.total_mass *= c;
  for (double& w : out.weights) w *= c;
  return out;
}

std::size_t for_each_quadrature_mark(const MarkMeasure& m, const MarkMcSettings& mc,
                                     const std::function<void(double, std::span<const double>)>& fn) {
  m.validate();
  if (m.total_mass == 0.0) return 0;
  if (m.is_atomic()) {
    for (std::size_t i = 0; i < m.atom_count(); ++i) fn(m.weights[i], m.atom(i));
    return m.atom_count();
  }
  RandomSource rs(StreamKey{mc.seed, 0, substream::mark_quadrature});
  const double w = m.total_mass / static_cast<double>(mc.n_samples);
  std::vector<double> x(static_cast<std::size_t>(m.dim));
  for (std::size_t i = 0; i < mc.n_samples; ++i) {
    m.sampler(rs, x);
    fn(w, x);
  }
  return mc.n_samples;
}

JumpLog sample_jumps(const MarkMeasure& m, double horizon, const StreamKey& key) {
  m.validate();
  if (!(horizon > 0)) throw DomainError("horizon must be positive");
  JumpLog log;
  log.mark_dim = m.dim;
  if (m.total_mass == 0.0) return log;

  StreamKey tk = key;
  tk.substream = substream::jump_times;
  RandomSource times_rs(tk);
  const auto n = times_rs.poisson(m.total_mass * horizon);
  log.times.resize(n);
  for (auto& t : log.times) t = horizon * times_rs.uniform01();  // (0, horizon]
  std::sort(log.times.begin(), log.times.end());

  StreamKey mk = key;
  mk.substream = substream::marks;
  RandomSource marks_rs(mk);
  log.marks.resize(n * static_cast<std::size_t>(m.dim));
  if (m.is_atomic()) {
    // Inverse-CDF over the atom weights.
    for (std::size_t i = 0; i < n; ++i) {
      const double u = marks_rs.uniform01() * m.total_mass;
      double acc = 0;
      std::size_t pick = m.atom_count() - 1;
      for (std::size_t a = 0; a < m.atom_count(); ++a) {
        acc += m.weights[a];
        if (u <= acc) {
          pick = a;
          break;
        }
      }
      auto src = m.atom(pick);
      std::copy(src.begin(), src.end(), log.marks.begin() + i * static_cast<std::size_t>(m.dim));
    }
  } else {
    std::vector<double> x(static_cast<std::size_t>(m.dim));
    for (std::size_t i = 0; i < n; ++i) {
      m.sampler(marks_rs, x);
      std::copy(x.begin(), x.end(), log.marks.begin() + i * static_cast<std::size_t>(m.dim));
    }
  }
  return log;
}

}  // namespace hjmm
