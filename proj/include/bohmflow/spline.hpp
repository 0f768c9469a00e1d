#pragma once

#include <array>

#include "bohmflow/grid.hpp"

namespace bohmflow {

/// Periodic cubic spline through samples on a uniform 1D or 2D grid
/// (tensor product in 2D). The second-derivative systems are circulant and
/// are solved in Fourier space.
class PeriodicSpline {
 public:
  /// Cell indices and interpolation weights of one point; computing it once
  /// lets several splines on the same grid share the lookup.
  struct Location {
    struct AxisWeights {
      Index lo = 0, hi = 0;
      double a = 0, b = 0, c = 0, d = 0;  // value = a f_lo + b f_hi + c M_lo + d M_hi
    };
    std::array<AxisWeights, 2> axis{};
  };

  static Location locate(const Grid& grid, const std::array<double, 2>& point);

  PeriodicSpline() = default;
  PeriodicSpline(const Grid& grid, const RealArray<double>& samples);

  /// Value at `point`; coordinates outside the box are wrapped.
  double operator()(const std::array<double, 2>& point) const { return (*this)(locate(grid_, point)); }
  double operator()(const Location& loc) const;

  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  RealArray<double> f_;
  RealArray<double> fxx_;   // second derivative along axis 0
  RealArray<double> fyy_;   // along axis 1 (2D only)
  RealArray<double> fxxyy_; // mixed fourth derivative (2D only)
};

}  // namespace bohmflow
