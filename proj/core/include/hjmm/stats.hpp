#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hjmm {

/// Streaming mean/variance (Welford).
struct MeanVar {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double var() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double sd() const;
  double se() const;  // sd / sqrt(n)
};

/// Point estimate with standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

Estimate mean_estimate(std::span<const double> xs);

/// Standard normal CDF.
double normal_cdf(double x);

/// Ordinary least squares y ~ intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fixed-design slope functional: precomputes the OLS weights for x so that
/// slope(y) = sum_k w_k y_k.  Used to turn each simulated path into one iid
/// slope sample.
class SlopeDesign {
 public:
  explicit SlopeDesign(std::span<const double> x);
  double slope(std::span<const double> y) const;
  std::span<const double> weights() const { return w_; }

 private:
  std::vector<double> w_;
};

/// Effective sample size (sum w)^2 / sum w^2 of importance weights.
double effective_sample_size(std::span<const double> w);

}  // namespace hjmm
