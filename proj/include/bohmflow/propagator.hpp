#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "bohmflow/spectral.hpp"

namespace bohmflow {

/// xi-independent potential, either absent or sampled on the field's grid.
template <class Real>
struct BasicPotential {
  std::optional<RealArray<Real>> values;

  static BasicPotential none() { return {}; }
  static BasicPotential sampled(RealArray<Real> v) {
    if (!v.allFinite()) throw ValidationError("potential: non-finite samples");
    return {std::move(v)};
  }
  bool is_none() const { return !values.has_value(); }
};

using Potential = BasicPotential<double>;

template <class Real>
struct BasicPropagationPlan {
  Real d_xi{};
  Real xi_end{};
  Index snapshot_stride = 1;
};

using PropagationPlan = BasicPropagationPlan<double>;

/// Plan bound to a start value and a grid. The step is shrunk (never grown)
/// so that an integer number of steps lands exactly on xi_end.
template <class Real>
struct ResolvedPlan {
  Real xi_start{};
  Real xi_end{};
  Real d_xi{};
  Index steps{};
  Index snapshot_stride{};
  Real stability_bound{};  // 0.5 dx^2, the recommended step ceiling
  bool within_bound{};

  /// Exact parameter value after `k` steps.
  Real xi_at(Index k) const { return k == steps ? xi_end : xi_start + static_cast<Real>(k) * d_xi; }
};

template <class Real>
Real default_step(const BasicGrid<Real>& g) {
  const Real dx = g.min_spacing();
  return std::min(Real(0.25) * dx * dx, Real(1e-2));
}

template <class Real>
ResolvedPlan<Real> resolve_plan(const BasicPropagationPlan<Real>& plan, Real xi_start,
                                const BasicGrid<Real>& g) {
  if (!(plan.d_xi > 0) || !std::isfinite(static_cast<double>(plan.d_xi))) {
    throw ValidationError("propagation plan: d_xi must be positive");
  }
  if (plan.snapshot_stride < 1) throw ValidationError("propagation plan: snapshot_stride must be >= 1");
  const Real span = plan.xi_end - xi_start;
  if (span < 0) throw ValidationError("propagation plan: xi_end precedes xi_start");
  ResolvedPlan<Real> r;
  r.xi_start = xi_start;
  r.xi_end = plan.xi_end;
  r.snapshot_stride = plan.snapshot_stride;
  const Real ratio = span / plan.d_xi;
  const Real nearest = std::round(ratio);
  r.steps = static_cast<Index>(std::abs(ratio - nearest) <= Real(1e-9) * std::max(Real(1), ratio)
                                   ? nearest
                                   : std::ceil(ratio));
  r.d_xi = r.steps > 0 ? span / static_cast<Real>(r.steps) : plan.d_xi;
  const Real dx = g.min_spacing();
  r.stability_bound = Real(0.5) * dx * dx;
  r.within_bound = r.d_xi <= r.stability_bound;
  return r;
}

/// Strang split-step integrator for i dpsi/dxi = -1/2 lap psi + V psi:
///   exp(-i V h/2) F^-1 exp(-i k^2 h/2) F exp(-i V h/2).
/// The kinetic factor is exact, so V = 0 evolution is exact at any h.
template <class Real>
class SplitStepPropagator {
 public:
  using Field = BasicWaveField<Real>;
  using Complex = std::complex<Real>;

  SplitStepPropagator(const BasicGrid<Real>& g, BasicPotential<Real> potential, Real d_xi)
      : transform_(g), potential_(std::move(potential)), d_xi_(d_xi) {
    if (!potential_.is_none() && potential_.values->size() != g.size()) {
      throw GridMismatch("potential does not match grid");
    }
    const RealArray<Real> k2 = g.wavenumber_sq();
    kinetic_ = (Complex(0, -d_xi / 2) * k2.template cast<Complex>()).exp();
    if (!potential_.is_none()) {
      half_potential_ = (Complex(0, -d_xi / 2) * potential_.values->template cast<Complex>()).exp();
    }
  }

  Real d_xi() const { return d_xi_; }

  Field step(const Field& in) {
    require_same_grid(in.grid(), transform_.grid(), "propagator step");
    ComplexArray<Real> v = in.values();
    if (!potential_.is_none()) v *= half_potential_;
    v = transform_.inverse(transform_.forward(v) * kinetic_);
    if (!potential_.is_none()) v *= half_potential_;
    return in.with_values(std::move(v), in.xi() + d_xi_);
  }

 private:
  SpectralTransform<Real> transform_;
  BasicPotential<Real> potential_;
  Real d_xi_;
  ComplexArray<Real> kinetic_;
  ComplexArray<Real> half_potential_;
};

/// One Strang step of size d_xi.
template <class Real>
BasicWaveField<Real> step(const BasicWaveField<Real>& field, const BasicPotential<Real>& potential, Real d_xi) {
  SplitStepPropagator<Real> p(field.grid(), potential, d_xi);
  return p.step(field);
}

template <class Real>
using SnapshotObserver = std::function<void(Index step, const BasicWaveField<Real>& snapshot)>;

template <class Real>
struct PropagationResult {
  BasicWaveField<Real> final_field;
  std::vector<BasicWaveField<Real>> snapshots;
  ResolvedPlan<Real> plan;
};

/// Runs plan.steps Strang steps from `field`. The observer (and the returned
/// snapshot list, when `keep_snapshots`) sees step 0, every
/// snapshot_stride-th step and the final step. Snapshot xi values are exact
/// multiples of the step rather than accumulated sums.
template <class Real>
PropagationResult<Real> propagate(const BasicWaveField<Real>& field, const BasicPotential<Real>& potential,
                                  const BasicPropagationPlan<Real>& plan,
                                  const SnapshotObserver<Real>& observer = {}, bool keep_snapshots = false) {
  PropagationResult<Real> out{field, {}, resolve_plan(plan, field.xi(), field.grid())};
  const auto& rp = out.plan;
  auto emit = [&](Index k, const BasicWaveField<Real>& f) {
    if (observer) observer(k, f);
    if (keep_snapshots) out.snapshots.push_back(f);
  };
  emit(0, field);
  if (rp.steps == 0) return out;
  SplitStepPropagator<Real> prop(field.grid(), potential, rp.d_xi);
  BasicWaveField<Real> current = field;
  for (Index k = 1; k <= rp.steps; ++k) {
    current = prop.step(current);
    current = current.with_values(current.values(), rp.xi_at(k));
    if (k % rp.snapshot_stride == 0 || k == rp.steps) emit(k, current);
  }
  out.final_field = current;
  return out;
}

}  // namespace bohmflow
