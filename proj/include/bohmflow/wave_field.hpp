#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include "bohmflow/grid.hpp"

namespace bohmflow {

/// Complex samples of a scalar wave on a grid at one value of the evolution
/// parameter xi (quantum time or optical z). Immutable once built.
template <class Real>
class BasicWaveField {
 public:
  using Complex = std::complex<Real>;
  using Values = ComplexArray<Real>;

  BasicWaveField() = default;

  BasicWaveField(BasicGrid<Real> grid, Real xi, Values values)
      : grid_(std::move(grid)), xi_(xi), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw GridMismatch("wave field has " + std::to_string(values_.size()) +
                         " samples, grid expects " + std::to_string(grid_.size()));
    }
  }

  const BasicGrid<Real>& grid() const { return grid_; }
  Real xi() const { return xi_; }
  const Values& values() const { return values_; }
  Index size() const { return values_.size(); }

  /// Same grid, new samples and/or parameter.
  BasicWaveField with_values(Values values) const { return {grid_, xi_, std::move(values)}; }
  BasicWaveField with_values(Values values, Real xi) const { return {grid_, xi, std::move(values)}; }

  /// 2D samples viewed as an (nx, ny) row-major matrix.
  auto as_matrix() const {
    using Mat = Eigen::Array<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    return Eigen::Map<const Mat>(values_.data(), grid_.axis(0).n,
                                 grid_.dimension() == 2 ? grid_.axis(1).n : 1);
  }

 private:
  BasicGrid<Real> grid_;
  Real xi_{};
  Values values_;
};

using WaveField = BasicWaveField<double>;

/// <f|g> = sum conj(f_j) g_j dx^d (conjugate-linear in f).
template <class Real>
std::complex<Real> inner(const BasicWaveField<Real>& f, const BasicWaveField<Real>& g) {
  require_same_grid(f.grid(), g.grid(), "inner");
  return (f.values().conjugate() * g.values()).sum() * f.grid().cell_volume();
}

template <class Real>
Real norm_sq(const BasicWaveField<Real>& f) {
  return f.values().abs2().sum() * f.grid().cell_volume();
}

template <class Real>
BasicWaveField<Real> normalized(const BasicWaveField<Real>& f) {
  const Real n = norm_sq(f);
  if (!(n > 0)) throw Error("cannot normalize a zero field");
  return f.with_values(f.values() / std::sqrt(n));
}

template <class Real>
bool is_normalized(const BasicWaveField<Real>& f, Real tol = Real(1e-10)) {
  return std::abs(norm_sq(f) - Real(1)) <= tol;
}

/// Fraction of sum |psi|^2 sitting in the outer `fraction` of the box along
/// any axis. Used to detect packets leaking across the periodic wrap.
template <class Real>
Real boundary_mass(const BasicWaveField<Real>& f, Real fraction = Real(0.1)) {
  const auto& g = f.grid();
  Real edge = 0;
  Real total = 0;
  const auto rho = f.values().abs2();
  for (Index p = 0; p < g.size(); ++p) {
    bool outer = false;
    for (int a = 0; a < g.dimension(); ++a) {
      const auto& ax = g.axis(a);
      const Real x = ax.coordinate(g.axis_index(p, a));
      const Real margin = fraction * ax.length();
      if (x < ax.x_min + margin || x >= ax.x_max - margin) outer = true;
    }
    total += rho[p];
    if (outer) edge += rho[p];
  }
  return total > 0 ? edge / total : Real(0);
}

/// Smooth real taper that goes to ~0 within `margin` of every box edge.
/// Multiplying a field by a positive real factor leaves Im(grad psi / psi),
/// hence the velocity field, unchanged; it only makes the samples periodic.
template <class Real>
RealArray<Real> edge_taper(const BasicGrid<Real>& g, Real margin, Real width) {
  RealArray<Real> w = RealArray<Real>::Ones(g.size());
  for (int a = 0; a < g.dimension(); ++a) {
    const auto& ax = g.axis(a);
    const Real lo = ax.x_min + margin / 2;
    const Real hi = ax.x_max - margin / 2;
    for (Index p = 0; p < g.size(); ++p) {
      const Real x = ax.coordinate(g.axis_index(p, a));
      w[p] *= Real(0.25) * std::erfc(-(x - lo) / width) * std::erfc((x - hi) / width);
    }
  }
  return w;
}

template <class Real>
BasicWaveField<Real> apodize(const BasicWaveField<Real>& f, Real margin, Real width) {
  return f.with_values(f.values() * edge_taper(f.grid(), margin, width).template cast<std::complex<Real>>());
}

}  // namespace bohmflow
