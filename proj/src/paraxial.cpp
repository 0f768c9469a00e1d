#include "bohmflow/paraxial.hpp"

#include <cmath>
#include <numbers>

#include "bohmflow/airy.hpp"

namespace bohmflow {

void OpticalMedium::validate() const {
  if (!(wavelength_vacuum > 0) || !std::isfinite(wavelength_vacuum)) {
    throw ValidationError("medium: wavelength_vacuum must be positive");
  }
  if (!(refractive_index >= 1) || !std::isfinite(refractive_index)) {
    throw ValidationError("medium: refractive_index must be >= 1");
  }
  if (!(transverse_scale > 0) || !std::isfinite(transverse_scale)) {
    throw ValidationError("medium: transverse_scale must be positive");
  }
}

ParaxialFrame::ParaxialFrame(OpticalMedium medium) : medium_(medium) {
  medium_.validate();
  k_ = 2 * std::numbers::pi * medium_.refractive_index / medium_.wavelength_vacuum;
}

ParaxialFrame::Coordinates ParaxialFrame::to_reduced(double x_phys, double z_phys) const {
  return {x_phys / x_unit(), z_phys / z_unit()};
}

ParaxialFrame::Coordinates ParaxialFrame::to_physical(double x_reduced, double z_reduced) const {
  return {x_reduced * x_unit(), z_reduced * z_unit()};
}

namespace {

double speed_of_parameter(const OpticalMedium& m, double mass) {
  m.validate();
  if (!(mass > 0) || !std::isfinite(mass)) throw ValidationError("mass must be positive");
  return kPlanck * m.refractive_index / (mass * m.wavelength_vacuum);
}

}  // namespace

double z_to_t(const OpticalMedium& medium, double z, double mass) { return z / speed_of_parameter(medium, mass); }

double t_to_z(const OpticalMedium& medium, double t, double mass) { return t * speed_of_parameter(medium, mass); }

double airy_velocity(const AirySpec& spec, double x, double z) {
  spec.validate();
  const cd y(x - spec.shift - 0.25 * z * z, spec.gamma * z);
  const cd ai = complex_airy(y);
  if (std::norm(ai) < kDefaultNodeThreshold * std::pow(airy_envelope(y), 2)) {
    throw NodeError("airy_velocity: Ai vanishes at x = " + std::to_string(x));
  }
  if (spec.gamma == 0) return 0.5 * z;
  constexpr double h = 1e-5;
  // arg of the ratio keeps the difference on one branch.
  const cd ratio = complex_airy(y + h) / complex_airy(y - h);
  return 0.5 * z + std::arg(ratio) / (2 * h);
}

PointValue counterprop_value(const AirySpec& a, const AirySpec& b, double x, double z, cd w_a, cd w_b) {
  const PointValue pa = airy_value(a, x, z);
  const PointValue pb = airy_value(b, -x, z);
  return {w_a * pa.value + w_b * pb.value, {w_a * pa.gradient[0] - w_b * pb.gradient[0], 0.0}};
}

WaveField counterprop_superposition(const AirySpec& a, const AirySpec& b, const Grid& grid, double z, cd w_a,
                                    cd w_b) {
  a.validate();
  b.validate();
  if (grid.dimension() != 1) throw GridMismatch("counterprop_superposition needs a 1D grid");
  ComplexArray<double> v(grid.size());
  for (Index j = 0; j < grid.size(); ++j) v[j] = counterprop_value(a, b, grid.axis(0).coordinate(j), z, w_a, w_b).value;
  return {grid, z, std::move(v)};
}

RealArray<double> counterprop_relative_density(const AirySpec& a, const AirySpec& b, const Grid& grid, double z,
                                               cd w_a, cd w_b) {
  const double ref = counterprop_superposition(a, b, grid, 0.0, w_a, w_b).values().abs2().maxCoeff();
  if (!(ref > 0)) throw DegenerateDensity("counterprop: zero field at z = 0");
  return counterprop_superposition(a, b, grid, z, w_a, w_b).values().abs2() / ref;
}

Peak airy_peak(const AirySpec& spec, const Grid& grid, double z) {
  const WaveField f = airy_field(spec, grid, z);
  Index j = 0;
  f.values().abs().maxCoeff(&j);
  const auto& ax = grid.axis(0);
  auto amp = [&](double x) { return std::abs(airy_value(spec, x, z).value); };
  double lo = ax.coordinate(j) - ax.dx();
  double hi = ax.coordinate(j) + ax.dx();
  const double r = (std::sqrt(5.0) - 1) / 2;
  double c = hi - r * (hi - lo), d = lo + r * (hi - lo);
  double fc = amp(c), fd = amp(d);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
    if (fc > fd) {
      hi = d; d = c; fd = fc;
      c = hi - r * (hi - lo); fc = amp(c);
    } else {
      lo = c; c = d; fc = fd;
      d = lo + r * (hi - lo); fd = amp(d);
    }
  }
  const double x = 0.5 * (lo + hi);
  Peak p{x, amp(x)};
  const double grid_max = f.values().abs().maxCoeff();
  if (grid_max > p.amplitude) p = {ax.coordinate(j), grid_max};
  return p;
}

std::shared_ptr<const VelocityProvider> airy_provider(AirySpec spec, Grid domain) {
  spec.validate();
  if (domain.dimension() != 1) throw GridMismatch("airy_provider needs a 1D domain");
  return std::make_shared<AnalyticProvider>(std::move(domain), [spec](const Point& r, double z) {
    Velocity v;
    try {
      v.v[0] = airy_velocity(spec, r[0], z);
    } catch (const NodeError&) {
      v.masked = true;
    } catch (const SpecialFunctionError&) {
      v.masked = true;
    }
    return v;
  });
}

std::shared_ptr<const VelocityProvider> counterprop_provider(AirySpec a, AirySpec b, Grid domain, cd w_a, cd w_b,
                                                             double eps) {
  a.validate();
  b.validate();
  return wave_function_provider(
      std::move(domain), [a, b, w_a, w_b](const Point& r, double z) { return counterprop_value(a, b, r[0], z, w_a, w_b); },
      0.0, eps);
}

}  // namespace bohmflow
