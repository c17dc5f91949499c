#include "hjmm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hjmm/errors.hpp"

namespace hjmm {

std::shared_ptr<const CurveGrid> CurveGrid::uniform(double dz, std::size_t n_cells) {
  if (!(dz > 0.0) || !std::isfinite(dz)) throw StructuralError("grid step must be positive and finite");
  if (n_cells == 0) throw StructuralError("grid needs at least one cell");
  auto g = std::shared_ptr<CurveGrid>(new CurveGrid);
  g->points_.resize(n_cells + 1);
  for (std::size_t k = 0; k <= n_cells; ++k) g->points_[k] = static_cast<double>(k) * dz;
  g->dz_ = dz;
  return g;
}

std::shared_ptr<const CurveGrid> CurveGrid::from_points(std::vector<double> points) {
  if (points.size() < 2) throw StructuralError("grid needs at least two points");
  if (points.front() != 0.0) throw StructuralError("grid must start at 0");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i] > points[i - 1])) throw StructuralError("grid points must be strictly increasing");
    if (!std::isfinite(points[i])) throw StructuralError("grid points must be finite");
  }
  auto g = std::shared_ptr<CurveGrid>(new CurveGrid);
  // Detect a uniform spacing so shifts can use index arithmetic.
  const double dz = points[1] - points[0];
  bool uniform = true;
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    if (std::abs((points[i + 1] - points[i]) - dz) > 1e-12 * std::max(1.0, dz)) {
      uniform = false;
      break;
    }
  }
  g->points_ = std::move(points);
  if (uniform) g->dz_ = dz;
  return g;
}

double CurveGrid::uniform_step() const {
  if (!dz_) throw StructuralError("operation requires a uniform grid");
  return *dz_;
}

std::size_t CurveGrid::steps_for(double t) const {
  const double dz = uniform_step();
  if (t < 0.0) throw StructuralError("duration must be nonnegative");
  const double ratio = t / dz;
  const auto n = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "duration %.17g is not a whole number of grid steps (dz=%.17g)", t, dz);
    throw StructuralError(buf);
  }
  return n;
}

std::size_t CurveGrid::index_of(double z, double tol) const {
  if (dz_) {
    const double ratio = z / *dz_;
    const auto i = static_cast<long long>(std::llround(ratio));
    if (i >= 0 && static_cast<std::size_t>(i) < points_.size() &&
        std::abs(points_[static_cast<std::size_t>(i)] - z) <= tol)
      return static_cast<std::size_t>(i);
  } else {
    auto it = std::lower_bound(points_.begin(), points_.end(), z - tol);
    if (it != points_.end() && std::abs(*it - z) <= tol)
      return static_cast<std::size_t>(it - points_.begin());
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "z=%.17g is not a grid point", z);
  throw StructuralError(buf);
}

bool CurveGrid::same_points(const CurveGrid& other) const {
  return points_ == other.points_;
}

bool same_grid(const GridPtr& a, const GridPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->same_points(*b);
}

}  // namespace hjmm
