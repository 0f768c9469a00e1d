#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "bohmflow/wave_field.hpp"

namespace bohmflow {

using cd = std::complex<double>;

/// Free Gaussian packet, one entry per axis. sigma0 is the standard
/// deviation of the amplitude at xi = 0 (|psi|^2 has std-dev sigma0 too).
struct GaussianSpec {
  Eigen::VectorXd center;
  Eigen::VectorXd sigma0;
  Eigen::VectorXd k0;
  cd weight{1.0, 0.0};

  int dimension() const { return static_cast<int>(center.size()); }
  void validate() const;
};

/// Width of |psi|^2 after free evolution: sigma0 sqrt(1 + (xi / 2 sigma0^2)^2).
double gaussian_width(double sigma0, double xi);

struct PointValue {
  cd value;
  std::array<cd, 2> gradient{};
};

/// Closed-form free-evolved 1D packet (normalized at xi = 0) and its x-derivative.
PointValue free_gaussian_1d(double center, double sigma0, double k0, double x, double xi);

/// weight * product of the per-axis packets at `point`.
PointValue gaussian_value(const GaussianSpec& spec, std::span<const double> point, double xi);

/// Exact free-evolved Gaussian on a grid. Throws ResolutionError when the
/// grid is coarser than sigma(xi)/4 or the carrier exceeds half the Nyquist
/// wavenumber.
WaveField gaussian_field(const GaussianSpec& spec, const Grid& grid, double xi);

/// Pointwise weighted sum of fields on one grid at one xi.
WaveField superpose(std::span<const WaveField> fields, std::span<const cd> weights,
                    bool renormalize = false);

/// Closed-form value of sum_i w_i psi_i for a packet list.
PointValue superposition_value(std::span<const GaussianSpec> packets, std::span<const double> point,
                               double xi);

WaveField superposition_field(std::span<const GaussianSpec> packets, const Grid& grid, double xi,
                              bool renormalize);

/// Bipartite state built from two 1D packets psi_A, psi_B centred on the
/// two sites. `parity` +1 selects the exchange-symmetric combination.
struct BellSpec {
  double site_a = -5.0;
  double site_b = 5.0;
  double sigma0 = 0.5;
  int parity = 1;

  void validate() const;
};

/// (psi_A(x) psi_B(y) + parity psi_B(x) psi_A(y)) / sqrt(2)
PointValue bell_value(const BellSpec& spec, double x, double y, double xi);
/// [psi_A(x) + psi_B(x)] [psi_A(y) + psi_B(y)] / 2
PointValue factorizable_value(const BellSpec& spec, double x, double y, double xi);

WaveField bell_field(const BellSpec& spec, const Grid& grid, double xi);
WaveField factorizable_field(const BellSpec& spec, const Grid& grid, double xi);

/// Airy profile Ai(x - shift) exp(gamma (x - shift)) at z = 0. gamma = 0 is the
/// ideal (non-normalizable) beam. `scale` is the transverse length x0 used
/// only when mapping to physical units.
struct AirySpec {
  double gamma = 0.0;
  double scale = 1e-4;
  double shift = 0.0;

  void validate() const;
};

/// Closed-form paraxial evolution of the (finite-energy) Airy profile:
///   psi = exp(i s z/2 - i z^3/12 + gamma s - gamma z^2/2 + i gamma^2 z/2) Ai(s - z^2/4 + i gamma z),
/// with s = x - shift.
PointValue airy_value(const AirySpec& spec, double x, double z);

WaveField airy_field(const AirySpec& spec, const Grid& grid, double z);

}  // namespace bohmflow
