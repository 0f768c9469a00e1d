#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bohmflow/hydrodynamics.hpp"
#include "bohmflow/spline.hpp"
#include "bohmflow/states.hpp"

namespace bohmflow {

/// Position in configuration space; entry 1 is unused in 1D.
using Point = std::array<double, 2>;

struct Velocity {
  Point v{};
  bool masked = false;
};

/// Right-hand side v(r, xi) of the guidance equation. Implementations are
/// shared read-only between worker threads and must be safe for concurrent
/// calls to `at`.
class VelocityProvider {
 public:
  virtual ~VelocityProvider() = default;
  virtual int dimension() const = 0;
  virtual Velocity at(const Point& r, double xi) const = 0;
  virtual bool inside(const Point& r) const { return domain().contains(std::span<const double>(r.data(), 2)); }
  /// Box the trajectories live in; also sets the substep length scale.
  virtual const Grid& domain() const = 0;
  virtual std::string mode() const = 0;
};

using VelocityFunction = std::function<Velocity(const Point&, double)>;
using WaveFunction = std::function<PointValue(const Point&, double)>;

/// Velocity given by a closed-form function of (r, xi).
class AnalyticProvider : public VelocityProvider {
 public:
  AnalyticProvider(Grid domain, VelocityFunction f) : domain_(std::move(domain)), f_(std::move(f)) {}
  int dimension() const override { return domain_.dimension(); }
  Velocity at(const Point& r, double xi) const override { return f_(r, xi); }
  const Grid& domain() const override { return domain_; }
  std::string mode() const override { return "analytic"; }

 private:
  Grid domain_;
  VelocityFunction f_;
};

/// v = Im(grad psi / psi) from a closed-form wave function. Points with
/// |psi|^2 < eps * rho_ref are masked, where rho_ref is max |psi(xi0)|^2
/// over the domain grid.
std::shared_ptr<const VelocityProvider> wave_function_provider(Grid domain, WaveFunction psi, double xi0,
                                                               double eps = kDefaultNodeThreshold);

std::shared_ptr<const VelocityProvider> gaussian_provider(std::vector<GaussianSpec> packets, Grid domain,
                                                          double xi0 = 0.0,
                                                          double eps = kDefaultNodeThreshold);
std::shared_ptr<const VelocityProvider> bell_provider(BellSpec spec, Grid domain, bool factorizable,
                                                      double eps = kDefaultNodeThreshold);

/// Velocity sampled from propagated snapshots: periodic cubic splines in
/// space, linear blending between the two bracketing snapshots. A point is
/// masked when any corner of its cell is masked in either snapshot.
class GridProvider : public VelocityProvider {
 public:
  /// Snapshots must share one grid and be uniformly spaced in xi.
  GridProvider(std::span<const WaveField> snapshots, double eps = kDefaultNodeThreshold);

  int dimension() const override { return grid_.dimension(); }
  Velocity at(const Point& r, double xi) const override;
  const Grid& domain() const override { return grid_; }
  std::string mode() const override { return "grid"; }

  double xi_first() const { return xi0_; }
  double xi_last() const { return xi0_ + spacing_ * static_cast<double>(frames_.size() - 1); }
  std::size_t snapshot_count() const { return frames_.size(); }

 private:
  struct Frame {
    std::array<PeriodicSpline, 2> v;
    BoolArray mask;
  };
  bool cell_masked(const Frame& f, const PeriodicSpline::Location& loc) const;

  Grid grid_;
  double xi0_ = 0;
  double spacing_ = 0;
  std::vector<Frame> frames_;
};

enum class TrajectoryStatus { complete, masked_stop, out_of_domain };

std::string to_string(TrajectoryStatus s);

struct Sample {
  double xi;
  Point position;
};

struct Trajectory {
  std::vector<Sample> samples;
  TrajectoryStatus status = TrajectoryStatus::complete;
  std::string stop_reason;  // empty when complete
};

/// Integration window. The step is shrunk so an integer number of steps
/// lands on xi_end; sample k sits at xi_start + k * step exactly.
struct TrajectoryPlan {
  double xi_start = 0;
  double xi_end = 0;
  double d_xi = 0;
  Index sample_stride = 1;  // keep every k-th step (the last step is always kept)

  Index steps() const;
  double step() const;
};

/// Classical RK4 in xi. Substeps are halved (at most 12 times) while
/// |v| h exceeds the domain spacing; past that the path stops as masked.
Trajectory integrate(const VelocityProvider& provider, const Point& x0, const TrajectoryPlan& plan);

/// Born-rule initial positions from grid density. 1D: inverse CDF of the
/// trapezoid cumulative sum, linearly interpolated. 2D: rejection sampling
/// against max rho with bilinear interpolation. Deterministic in `seed`.
std::vector<Point> sample_born(const Grid& grid, const RealArray<double>& rho, std::size_t n, std::uint64_t seed);

/// Cumulative distribution of the linearly interpolated 1D grid density
/// over [x_0, x_{n-1}], normalized to 1. `mass` integrates a cubic Hermite
/// interpolant instead, which is fourth-order accurate for smooth densities.
class DensityCdf {
 public:
  DensityCdf(const Grid& grid, const RealArray<double>& rho);
  double operator()(double x) const;
  double inverse(double u) const;
  /// Unnormalized integral of rho between a and b.
  double mass(double a, double b) const;

 private:
  double linear_cum(double x) const;

  Axis<double> axis_;
  std::vector<double> rho_;
  std::vector<double> slope_;
  std::vector<double> cum_;
  std::vector<double> hermite_cum_;
};

/// sup |F_empirical - F| of 1D samples against grid density.
double ks_statistic(std::vector<double> samples, const Grid& grid, const RealArray<double>& rho);

struct EnsembleOptions {
  Index histogram_bins = 64;
  unsigned threads = 0;  // 0: BOHMFLOW_THREADS or 1
};

struct StatusCounts {
  std::size_t complete = 0, masked_stop = 0, out_of_domain = 0;
};

struct EnsembleReport {
  std::vector<Trajectory> trajectories;
  std::uint64_t seed = 0;
  std::string sampler;
  std::size_t crossing_violations = 0;
  /// Endpoint density of completed trajectories: bins along x (1D) or
  /// bins x bins row-major (2D), normalized by the ensemble size.
  std::vector<double> transport_histogram;
  StatusCounts statuses;
};

/// Integrates one trajectory per initial position.
EnsembleReport run_trajectories(const VelocityProvider& provider, std::span<const Point> initial,
                                const TrajectoryPlan& plan, const EnsembleOptions& options = {});

/// Born-samples n positions from rho0 and integrates them.
EnsembleReport run_ensemble(const VelocityProvider& provider, const Grid& grid, const RealArray<double>& rho0,
                            std::size_t n, std::uint64_t seed, const TrajectoryPlan& plan,
                            const EnsembleOptions& options = {});

/// Adjacent sort-order inversions (1D), summed over stored sample indices.
std::size_t count_crossings(std::span<const Trajectory> trajectories);

/// Worker count from BOHMFLOW_THREADS (default 1).
unsigned worker_count();

struct BoundaryTransport {
  std::vector<Point> initial;
  std::vector<Point> mapped;
  double mass_initial = 0;
  double mass_final = 0;
};

/// Maps interval endpoints (1D) or a closed polygon (2D) to xi_end and
/// compares enclosed mass. Points lying on the box edges are held fixed.
/// Throws MaskedBoundary if any boundary trajectory stops.
BoundaryTransport boundary_transport(const VelocityProvider& provider, std::span<const Point> boundary0,
                                     const TrajectoryPlan& plan, const WaveField& rho_start,
                                     const WaveField& rho_end);

struct ProbeResult {
  std::vector<Trajectory> variants;
  std::vector<double> deviation;  // max_xi |x_i - x_0| over common samples
  double max_deviation = 0;
};

/// Trajectories from (x0, y0_i); reports how far their x-projections drift
/// from the first variant's.
ProbeResult entanglement_probe(const VelocityProvider& provider, double x0, std::span<const double> y0_variants,
                               const TrajectoryPlan& plan);

}  // namespace bohmflow
