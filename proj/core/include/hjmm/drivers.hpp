#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hjmm/rng.hpp"
#include "hjmm/stats.hpp"

namespace hjmm {

/// Diagonal covariance of the driving cylindrical Brownian motion: factor j
/// has variance rate lambda_j.  Eigenvalues must be positive, nonincreasing
/// and summable (they are a finite list here, so summable by construction;
/// validate() still checks order and positivity).
struct CovarianceSpec {
  std::vector<double> eigenvalues;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  void validate() const;
  double total() const;
};

/// Increments of the driven factors over n_steps steps of length dt:
/// row-major [step][factor], entry ~ N(0, lambda_j * dt), independent.
/// Consumption order (step-major, factor-minor) is part of the
/// reproducibility contract.
std::vector<double> brownian_increments(const CovarianceSpec& cov, std::size_t n_steps, double dt,
                                        const StreamKey& key);
void brownian_increments_into(const CovarianceSpec& cov, std::size_t n_steps, double dt,
                              const StreamKey& key, std::vector<double>& out);

/// Record of one path's jumps: arrival times (sorted, in (0, horizon]) and
/// the corresponding marks, flattened row-major when marks are vectors.
struct JumpLog {
  std::vector<double> times;
  std::vector<double> marks;
  int mark_dim = 1;

  std::size_t count() const { return times.size(); }
  std::span<const double> mark(std::size_t i) const {
    return {marks.data() + i * static_cast<std::size_t>(mark_dim), static_cast<std::size_t>(mark_dim)};
  }
  void validate(double horizon) const;
};

/// Settings for Monte Carlo mark integrals (sampler-based measures).
struct MarkMcSettings {
  std::size_t n_samples = 100000;
  std::uint64_t seed = 20240901;
  double rel_tol = 5e-3;  // AccuracyError above this relative standard error
};

/// Finite-activity mark measure on R^d: either an explicit list of weighted
/// atoms (integrals are exact sums) or a normalized sampler with total mass
/// (integrals are fixed-seed Monte Carlo with reported standard error).
struct MarkMeasure {
  int dim = 1;
  double total_mass = 0.0;  // jump intensity; 0 = no jumps

  // Atomic representation: weights[i] > 0 summing to total_mass, atom i is
  // atoms[i*dim .. i*dim+dim).
  std::vector<double> weights;
  std::vector<double> atoms;

  // Sampler representation: draws one mark from the normalized distribution.
  std::function<void(RandomSource&, std::span<double>)> sampler;

  std::string description;

  bool is_atomic() const { return !weights.empty(); }
  std::size_t atom_count() const { return weights.size(); }
  std::span<const double> atom(std::size_t i) const {
    return {atoms.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  void validate() const;

  /// Integral of g against the measure (mass-weighted, not normalized).
  /// Atomic: exact, se = 0.  Sampler: fixed-seed MC with standard error.
  Estimate integrate(const std::function<double(std::span<const double>)>& g,
                     const MarkMcSettings& mc) const;

  /// Scale the intensity by c > 0 keeping the mark distribution.
  MarkMeasure scaled(double c) const;
};

/// Visit quadrature nodes of the measure: fn(weight, mark) with
/// sum of weights = total_mass.  Atomic measures visit their atoms;
/// sampler measures visit n_samples fixed-seed draws with equal weights.
/// Returns the number of nodes visited.
std::size_t for_each_quadrature_mark(const MarkMeasure& m, const MarkMcSettings& mc,
                                     const std::function<void(double, std::span<const double>)>& fn);

/// Simulate one path's jumps over [0, horizon]: Poisson(total_mass * horizon)
/// count, arrival times iid uniform (sorted), marks iid from the measure.
/// Counts/times and marks come from separate substreams of key so the mark
/// stream does not depend on how many times were consumed.
JumpLog sample_jumps(const MarkMeasure& m, double horizon, const StreamKey& key);

}  // namespace hjmm
