#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "bohmflow/spectral.hpp"

namespace bohmflow {

inline constexpr double kDefaultNodeThreshold = 1e-12;

/// Real fields of the hydrodynamic picture, all in units hbar = m = 1.
/// Vector quantities hold one column per axis. Values at masked points are
/// set to zero and must not be used.
template <class Real>
struct BasicHydroFields {
  RealArray<Real> rho;
  VectorFieldArray<Real> current;
  VectorFieldArray<Real> velocity;
  RealArray<Real> q_potential;
  VectorFieldArray<Real> osmotic;
  BoolArray node_mask;

  Index masked_count() const { return node_mask.count(); }
};

using HydroFields = BasicHydroFields<double>;

template <class Real>
RealArray<Real> density(const BasicWaveField<Real>& field) {
  return field.values().abs2();
}

/// rho < eps * max(rho).
template <class Real>
BoolArray node_mask(const RealArray<Real>& rho, Real eps) {
  if (!(eps > 0) || eps > Real(1e-3)) throw ValidationError("node threshold must lie in (0, 1e-3]");
  const Real cut = eps * rho.maxCoeff();
  return rho < cut;
}

/// j = Im(conj(psi) grad psi).
template <class Real>
VectorFieldArray<Real> current(const BasicWaveField<Real>& field) {
  SpectralTransform<Real> t(field.grid());
  const auto d = spectral_derivatives(t, field.values(), false);
  VectorFieldArray<Real> j(field.size(), field.grid().dimension());
  for (int a = 0; a < field.grid().dimension(); ++a) {
    j.col(a) = (field.values().conjugate() * d.gradient[a]).imag();
  }
  return j;
}

template <class Real>
struct VelocityResult {
  VectorFieldArray<Real> velocity;
  BoolArray node_mask;
};

/// v = j / rho on points with rho >= eps * max(rho); masked points get 0.
template <class Real>
VelocityResult<Real> velocity(const BasicWaveField<Real>& field, Real eps = Real(kDefaultNodeThreshold)) {
  const RealArray<Real> rho = density(field);
  VelocityResult<Real> out{current(field), node_mask(rho, eps)};
  for (int a = 0; a < out.velocity.cols(); ++a) {
    out.velocity.col(a) = out.node_mask.select(Real(0), out.velocity.col(a) / rho);
  }
  return out;
}

/// Bohm's quantum potential Q = -1/2 lap(A)/A, A = |psi|. Evaluated through
/// the identity lap(A)/A = Re(lap psi / psi) + |Im(grad psi / psi)|^2, which
/// only differentiates the smooth field psi (A itself has kinks at nodes).
template <class Real>
RealArray<Real> quantum_potential(const BasicWaveField<Real>& field, Real eps = Real(kDefaultNodeThreshold)) {
  SpectralTransform<Real> t(field.grid());
  const auto d = spectral_derivatives(t, field.values(), true);
  const RealArray<Real> rho = density(field);
  const BoolArray mask = node_mask(rho, eps);
  const ComplexArray<Real>& psi = field.values();
  RealArray<Real> curv = (psi.conjugate() * d.laplacian).real() / rho;
  for (int a = 0; a < field.grid().dimension(); ++a) {
    curv += ((psi.conjugate() * d.gradient[a]).imag() / rho).square();
  }
  return mask.select(Real(0), Real(-0.5) * curv);
}

/// -1/2 grad(rho)/rho, i.e. Im of the position-post-selected momentum weak value.
template <class Real>
VectorFieldArray<Real> osmotic_velocity(const BasicWaveField<Real>& field, Real eps = Real(kDefaultNodeThreshold)) {
  SpectralTransform<Real> t(field.grid());
  const auto d = spectral_derivatives(t, field.values(), false);
  const RealArray<Real> rho = density(field);
  const BoolArray mask = node_mask(rho, eps);
  VectorFieldArray<Real> u(field.size(), field.grid().dimension());
  for (int a = 0; a < field.grid().dimension(); ++a) {
    // grad rho = 2 Re(conj(psi) grad psi)
    const RealArray<Real> grad_rho = Real(2) * (field.values().conjugate() * d.gradient[a]).real();
    u.col(a) = mask.select(Real(0), Real(-0.5) * grad_rho / rho);
  }
  return u;
}

/// All hydrodynamic fields from one pair of spectral derivative passes.
template <class Real>
BasicHydroFields<Real> hydro_fields(const BasicWaveField<Real>& field, Real eps = Real(kDefaultNodeThreshold)) {
  SpectralTransform<Real> t(field.grid());
  const auto d = spectral_derivatives(t, field.values(), true);
  const ComplexArray<Real>& psi = field.values();
  const int dim = field.grid().dimension();
  BasicHydroFields<Real> h;
  h.rho = psi.abs2();
  h.node_mask = node_mask(h.rho, eps);
  h.current.resize(field.size(), dim);
  h.velocity.resize(field.size(), dim);
  h.osmotic.resize(field.size(), dim);
  RealArray<Real> curv = (psi.conjugate() * d.laplacian).real() / h.rho;
  for (int a = 0; a < dim; ++a) {
    const ComplexArray<Real> prod = psi.conjugate() * d.gradient[a];
    h.current.col(a) = prod.imag();
    const RealArray<Real> v = prod.imag() / h.rho;
    curv += v.square();
    h.velocity.col(a) = h.node_mask.select(Real(0), v);
    h.osmotic.col(a) = h.node_mask.select(Real(0), -prod.real() / h.rho);
  }
  h.q_potential = h.node_mask.select(Real(0), Real(-0.5) * curv);
  return h;
}

/// Unwrapped phase S along one grid line, anchored to 0 at `anchor`.
/// For 2D fields `line` selects the line index on the other axis. Only the
/// index range [first, last] is unwrapped (defaults: full line); a masked
/// point inside that range raises NodeOnLine. Increments are taken as
/// arg(psi_j / psi_{j-1}), so no 2pi jumps appear.
template <class Real>
RealArray<Real> phase_line(const BasicWaveField<Real>& field, int axis, Index anchor, Index line = 0,
                           std::optional<Index> first = std::nullopt, std::optional<Index> last = std::nullopt,
                           Real eps = Real(kDefaultNodeThreshold)) {
  const auto& g = field.grid();
  const Index n = g.axis(axis).n;
  const Index lo = first.value_or(0);
  const Index hi = last.value_or(n - 1);
  if (lo < 0 || hi >= n || lo > hi || anchor < lo || anchor > hi) {
    throw ValidationError("phase_line: anchor or range outside the line");
  }
  auto at = [&](Index j) {
    if (g.dimension() == 1) return field.values()[j];
    return axis == 0 ? field.values()[g.flat_index(j, line)] : field.values()[g.flat_index(line, j)];
  };
  const RealArray<Real> rho = density(field);
  const Real cut = eps * rho.maxCoeff();
  for (Index j = lo; j <= hi; ++j) {
    if (std::norm(at(j)) < cut) {
      throw NodeOnLine("phase_line: masked node at index " + std::to_string(j));
    }
  }
  RealArray<Real> s = RealArray<Real>::Zero(n);
  for (Index j = anchor + 1; j <= hi; ++j) s[j] = s[j - 1] + std::arg(at(j) / at(j - 1));
  for (Index j = anchor - 1; j >= lo; --j) s[j] = s[j + 1] - std::arg(at(j + 1) / at(j));
  return s;
}

/// L2 norm (times sqrt(dx^d)) of the discrete continuity residual
///   (rho(xi + h) - rho(xi - h)) / 2h + div j(xi).
template <class Real>
Real continuity_residual(const BasicWaveField<Real>& before, const BasicWaveField<Real>& centre,
                         const BasicWaveField<Real>& after) {
  require_same_grid(before.grid(), centre.grid(), "continuity_residual");
  require_same_grid(after.grid(), centre.grid(), "continuity_residual");
  const Real h = (after.xi() - before.xi()) / 2;
  const RealArray<Real> drho = (density(after) - density(before)) / (2 * h);
  const RealArray<Real> residual = drho + divergence(centre.grid(), current(centre));
  return std::sqrt(residual.square().sum() * centre.grid().cell_volume());
}

}  // namespace bohmflow
