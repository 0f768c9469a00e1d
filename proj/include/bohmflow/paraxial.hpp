#pragma once

#include <memory>

#include "bohmflow/trajectories.hpp"

namespace bohmflow {

inline constexpr double kPlanck = 6.62607015e-34;  // J s

/// Homogeneous medium and transverse length unit, SI units.
struct OpticalMedium {
  double wavelength_vacuum = 500e-9;
  double refractive_index = 1.0;
  double transverse_scale = 100e-6;

  void validate() const;
};

/// Reduced paraxial units: x~ = x / x0, z~ = z / (k x0^2), k = 2 pi n / lambda0.
class ParaxialFrame {
 public:
  explicit ParaxialFrame(OpticalMedium medium = {});

  const OpticalMedium& medium() const { return medium_; }
  double wavenumber() const { return k_; }
  double x_unit() const { return medium_.transverse_scale; }
  double z_unit() const { return k_ * medium_.transverse_scale * medium_.transverse_scale; }

  struct Coordinates {
    double x;
    double z;
  };
  Coordinates to_reduced(double x_phys, double z_phys) const;
  Coordinates to_physical(double x_reduced, double z_reduced) const;

 private:
  OpticalMedium medium_;
  double k_;
};

/// Optical <-> matter-wave parameter map z = (h n / (m lambda0)) t for a
/// particle of mass `mass` (kg).
double z_to_t(const OpticalMedium& medium, double z, double mass);
double t_to_z(const OpticalMedium& medium, double t, double mass);

/// Transverse velocity dx~/dz~ of the Airy beam in reduced units:
/// z~/2 exactly for gamma = 0; otherwise z~/2 plus a central difference
/// (h = 1e-5) of arg Ai along x~. Throws NodeError where |Ai| vanishes
/// relative to its local envelope.
double airy_velocity(const AirySpec& spec, double x, double z);

/// psi = w_a A(x) + w_b B(-x): beam B mirrored in x~.
PointValue counterprop_value(const AirySpec& a, const AirySpec& b, double x, double z, cd w_a = 1.0,
                             cd w_b = 1.0);
WaveField counterprop_superposition(const AirySpec& a, const AirySpec& b, const Grid& grid, double z,
                                    cd w_a = 1.0, cd w_b = 1.0);

/// |psi(z)|^2 divided by max |psi(0)|^2 on the same grid.
RealArray<double> counterprop_relative_density(const AirySpec& a, const AirySpec& b, const Grid& grid, double z,
                                               cd w_a = 1.0, cd w_b = 1.0);

struct Peak {
  double x;
  double amplitude;
};

/// Largest |psi(., z)| of the Airy beam: grid argmax refined on the closed
/// form by golden-section search.
Peak airy_peak(const AirySpec& spec, const Grid& grid, double z);

/// Trajectory providers driven by the closed forms.
std::shared_ptr<const VelocityProvider> airy_provider(AirySpec spec, Grid domain);
std::shared_ptr<const VelocityProvider> counterprop_provider(AirySpec a, AirySpec b, Grid domain, cd w_a = 1.0,
                                                             cd w_b = 1.0, double eps = kDefaultNodeThreshold);

}  // namespace bohmflow
