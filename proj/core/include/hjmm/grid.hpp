#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace hjmm {

/// Strictly increasing maturity grid on [0, z_max] with first point at 0.
///
/// Grids are immutable and shared between curves via shared_ptr, so equality
/// checks are usually pointer comparisons.  Uniform grids additionally know
/// their step and support exact index arithmetic for time shifts.
class CurveGrid {
 public:
  /// Uniform grid with points k*dz for k = 0..n_cells.  Points are computed
  /// as k*dz (not accumulated) so that multiples stay exact in binary.
  static std::shared_ptr<const CurveGrid> uniform(double dz, std::size_t n_cells);

  /// Arbitrary strictly increasing points; points[0] must be 0.
  static std::shared_ptr<const CurveGrid> from_points(std::vector<double> points);

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }         // number of points
  std::size_t cells() const { return points_.size() - 1; }
  double z_max() const { return points_.back(); }
  double point(std::size_t i) const { return points_[i]; }

  bool is_uniform() const { return dz_.has_value(); }
  /// Step of a uniform grid; throws StructuralError otherwise.
  double uniform_step() const;

  /// Number of grid steps equal to the duration t on a uniform grid.
  /// Throws StructuralError unless t is a whole number of steps (to 1e-9 rel).
  std::size_t steps_for(double t) const;

  /// Exact lookup of an on-grid point; throws StructuralError if z is not a
  /// grid point (within absolute tolerance tol).
  std::size_t index_of(double z, double tol = 1e-12) const;

  bool same_points(const CurveGrid& other) const;

 private:
  CurveGrid() = default;
  std::vector<double> points_;
  std::optional<double> dz_;
};

using GridPtr = std::shared_ptr<const CurveGrid>;

/// True when a and b are the same grid object or have identical points.
bool same_grid(const GridPtr& a, const GridPtr& b);

}  // namespace hjmm
