#include "hjmm/stats.hpp"

#include <cmath>

#include "hjmm/errors.hpp"

namespace hjmm {

double MeanVar::sd() const { return std::sqrt(var()); }
double MeanVar::se() const { return n > 0 ? sd() / std::sqrt(static_cast<double>(n)) : 0.0; }

Estimate mean_estimate(std::span<const double> xs) {
  MeanVar mv;
  for (double x : xs) mv.add(x);
  return {mv.mean, mv.se()};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw StructuralError("fit_line needs matching arrays of size >= 2");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double xb = sx / n, yb = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xb) * (x[i] - xb);
    sxy += (x[i] - xb) * (y[i] - yb);
  }
  if (sxx == 0.0) throw StructuralError("fit_line: degenerate design");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = yb - f.slope * xb;
  return f;
}

SlopeDesign::SlopeDesign(std::span<const double> x) {
  if (x.size() < 2) throw StructuralError("SlopeDesign needs >= 2 points");
  double sx = 0;
  for (double v : x) sx += v;
  const double xb = sx / static_cast<double>(x.size());
  double sxx = 0;
  for (double v : x) sxx += (v - xb) * (v - xb);
  if (sxx == 0.0) throw StructuralError("SlopeDesign: degenerate design");
  w_.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) w_[i] = (x[i] - xb) / sxx;
}

double SlopeDesign::slope(std::span<const double> y) const {
  if (y.size() != w_.size()) throw StructuralError("SlopeDesign: size mismatch");
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += w_[i] * y[i];
  return s;
}

double effective_sample_size(std::span<const double> w) {
  double s = 0, s2 = 0;
  for (double v : w) {
    s += v;
    s2 += v * v;
  }
  return s2 > 0 ? s * s / s2 : 0.0;
}

}  // namespace hjmm
