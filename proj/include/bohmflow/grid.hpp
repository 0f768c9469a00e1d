#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "bohmflow/errors.hpp"

namespace bohmflow {

using Index = Eigen::Index;

template <class Real>
using RealArray = Eigen::Array<Real, Eigen::Dynamic, 1>;

template <class Real>
using ComplexArray = Eigen::Array<std::complex<Real>, Eigen::Dynamic, 1>;

/// One column per axis, one row per grid point.
template <class Real>
using VectorFieldArray = Eigen::Array<Real, Eigen::Dynamic, Eigen::Dynamic>;

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Periodic axis: samples x_j = x_min + j*dx for j = 0..n-1; x_max is the
/// wrap point and is never sampled.
template <class Real>
struct Axis {
  Real x_min{};
  Real x_max{};
  Index n{};

  Real length() const { return x_max - x_min; }
  Real dx() const { return length() / static_cast<Real>(n); }
  Real coordinate(Index j) const { return x_min + static_cast<Real>(j) * dx(); }

  /// Standard DFT ordering: non-negative modes first, then negative ones.
  Real wavenumber(Index j) const {
    const Real scale = Real(2) * std::numbers::pi_v<Real> / (static_cast<Real>(n) * dx());
    const Index m = (j < n / 2) ? j : j - n;
    return scale * static_cast<Real>(m);
  }

  Real nyquist() const { return std::numbers::pi_v<Real> / dx(); }

  bool operator==(const Axis&) const = default;
};

/// Uniform 1D or 2D lattice. 2D data is stored row-major with axis 0 (x)
/// as the slow index: flat = ix * ny + iy.
template <class Real>
class BasicGrid {
 public:
  BasicGrid() = default;

  explicit BasicGrid(std::vector<Axis<Real>> axes) : axes_(std::move(axes)) {
    if (axes_.empty() || axes_.size() > 2) {
      throw InvalidGrid("grid dimension must be 1 or 2, got " + std::to_string(axes_.size()));
    }
    for (std::size_t a = 0; a < axes_.size(); ++a) {
      const auto& ax = axes_[a];
      std::ostringstream where;
      where << "axis " << a << ": ";
      if (!std::isfinite(static_cast<double>(ax.x_min)) ||
          !std::isfinite(static_cast<double>(ax.x_max))) {
        throw InvalidGrid(where.str() + "bounds must be finite");
      }
      if (!(ax.x_max > ax.x_min)) {
        throw InvalidGrid(where.str() + "x_max must exceed x_min");
      }
      if (ax.n < 8) {
        throw InvalidGrid(where.str() + "need at least 8 samples, got " + std::to_string(ax.n));
      }
    }
  }

  int dimension() const { return static_cast<int>(axes_.size()); }
  const Axis<Real>& axis(int a) const { return axes_.at(static_cast<std::size_t>(a)); }
  const std::vector<Axis<Real>>& axes() const { return axes_; }

  Index size() const {
    Index total = 1;
    for (const auto& ax : axes_) total *= ax.n;
    return total;
  }

  /// dx^d, the quadrature weight of one sample.
  Real cell_volume() const {
    Real v = 1;
    for (const auto& ax : axes_) v *= ax.dx();
    return v;
  }

  Real min_spacing() const {
    Real m = axes_.front().dx();
    for (const auto& ax : axes_) m = std::min(m, ax.dx());
    return m;
  }

  /// Stride of axis `a` in the flat layout.
  Index stride(int a) const { return (dimension() == 2 && a == 0) ? axes_[1].n : 1; }

  Index flat_index(Index i0, Index i1 = 0) const {
    return dimension() == 2 ? i0 * axes_[1].n + i1 : i0;
  }

  /// Index of flat point `p` along axis `a`.
  Index axis_index(Index p, int a) const {
    if (dimension() == 1) return p;
    return a == 0 ? p / axes_[1].n : p % axes_[1].n;
  }

  /// Coordinate along axis `a` of every grid point, in flat order.
  RealArray<Real> coordinates(int a) const {
    RealArray<Real> out(size());
    for (Index p = 0; p < size(); ++p) out[p] = axis(a).coordinate(axis_index(p, a));
    return out;
  }

  /// Wavenumber along axis `a` of every spectral bin, in flat order.
  RealArray<Real> wavenumbers(int a) const {
    RealArray<Real> out(size());
    for (Index p = 0; p < size(); ++p) out[p] = axis(a).wavenumber(axis_index(p, a));
    return out;
  }

  /// Wavenumber ladder of a single axis.
  RealArray<Real> axis_wavenumbers(int a) const {
    RealArray<Real> out(axis(a).n);
    for (Index j = 0; j < axis(a).n; ++j) out[j] = axis(a).wavenumber(j);
    return out;
  }

  /// |k|^2 for every spectral bin.
  RealArray<Real> wavenumber_sq() const {
    RealArray<Real> out = RealArray<Real>::Zero(size());
    for (int a = 0; a < dimension(); ++a) out += wavenumbers(a).square();
    return out;
  }

  bool contains(std::span<const Real> point) const {
    for (int a = 0; a < dimension(); ++a) {
      if (point[a] < axes_[a].x_min || point[a] >= axes_[a].x_max) return false;
    }
    return true;
  }

  bool operator==(const BasicGrid&) const = default;

 private:
  std::vector<Axis<Real>> axes_;
};

using Grid = BasicGrid<double>;

template <class Real>
BasicGrid<Real> make_grid(std::vector<Axis<Real>> axes) {
  return BasicGrid<Real>(std::move(axes));
}

inline Grid make_grid(std::initializer_list<Axis<double>> axes) {
  return Grid(std::vector<Axis<double>>(axes));
}

template <class Real>
void require_same_grid(const BasicGrid<Real>& a, const BasicGrid<Real>& b, const char* what) {
  if (!(a == b)) throw GridMismatch(std::string(what) + ": grids differ");
}

}  // namespace bohmflow
