#pragma once

#include <cmath>
#include <complex>

#include "bohmflow/hydrodynamics.hpp"

namespace bohmflow {

enum class Observable { position, momentum };

/// One weak value <x|A|psi>/<x|psi> per post-selected grid point.
template <class Real>
struct BasicWeakValueField {
  Observable observable{};
  int axis = 0;
  ComplexArray<Real> values;  // zero where masked
  BoolArray node_mask;
};

using WeakValueField = BasicWeakValueField<double>;

/// Position post-selection: the weak value is the eigenvalue x_j itself.
template <class Real>
BasicWeakValueField<Real> weak_value_position(const BasicWaveField<Real>& field, int axis = 0,
                                              Real eps = Real(kDefaultNodeThreshold)) {
  const BoolArray mask = node_mask(density(field), eps);
  const ComplexArray<Real> x = field.grid().coordinates(axis).template cast<std::complex<Real>>();
  return {Observable::position, axis, mask.select(std::complex<Real>(0), x), mask};
}

/// -i (d psi / dx_axis) / psi. Its real part is the velocity field and its
/// imaginary part equals -grad(rho)/(2 rho) (the osmotic_velocity output).
template <class Real>
BasicWeakValueField<Real> weak_value_momentum(const BasicWaveField<Real>& field, int axis = 0,
                                              Real eps = Real(kDefaultNodeThreshold)) {
  const BoolArray mask = node_mask(density(field), eps);
  const ComplexArray<Real> grad = gradient(field, axis);
  const ComplexArray<Real> w = std::complex<Real>(0, -1) * grad / field.values();
  return {Observable::momentum, axis, mask.select(std::complex<Real>(0), w), mask};
}

template <class Real>
struct Reconstruction {
  Real value{};
  Real imaginary_residual{};
  Real masked_mass{};
};

/// sum_j rho_j W_j dx^d over unmasked points. Throws MassLoss when masked
/// points carry more than `max_masked_mass` of the probability.
template <class Real>
Reconstruction<Real> reconstruct_expectation(const BasicWaveField<Real>& field, Observable obs, int axis = 0,
                                             Real eps = Real(kDefaultNodeThreshold),
                                             Real max_masked_mass = Real(1e-6)) {
  const auto wv = obs == Observable::position ? weak_value_position(field, axis, eps)
                                              : weak_value_momentum(field, axis, eps);
  const RealArray<Real> rho = density(field);
  const Real dv = field.grid().cell_volume();
  Reconstruction<Real> r;
  r.masked_mass = wv.node_mask.select(rho, Real(0)).sum() * dv;
  if (r.masked_mass > max_masked_mass) {
    throw MassLoss("reconstruct_expectation: masked points carry " + std::to_string(r.masked_mass) +
                   " of the probability");
  }
  const std::complex<Real> total = (rho.template cast<std::complex<Real>>() * wv.values).sum() * dv;
  r.value = total.real();
  r.imaginary_residual = total.imag();
  return r;
}

/// Weak values for a caller-supplied orthonormal basis {b_i} (columns of
/// `basis`, orthonormal under sum conj(a) b dx^d) and the already-applied
/// operator image `a_psi` = A psi:  W_i = <b_i|A psi> / <b_i|psi>.
template <class Real>
struct BasisWeakValues {
  ComplexArray<Real> values;
  RealArray<Real> probabilities;  // |<b_i|psi>|^2
};

template <class Real>
BasisWeakValues<Real> weak_values_in_basis(
    const BasicWaveField<Real>& field,
    const Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>& basis,
    const ComplexArray<Real>& a_psi) {
  if (basis.rows() != field.size() || a_psi.size() != field.size()) {
    throw GridMismatch("weak_values_in_basis: basis rows must match the grid");
  }
  const Real dv = field.grid().cell_volume();
  const ComplexArray<Real> amp = (basis.adjoint() * field.values().matrix()).array() * dv;
  const ComplexArray<Real> num = (basis.adjoint() * a_psi.matrix()).array() * dv;
  return {num / amp, amp.abs2()};
}

}  // namespace bohmflow
