#pragma once

// Integral-representation oracle for Ai(z), independent of the series /
// asymptotic / Taylor-stepping evaluator in the library.
//
//   |z| < 1.5 : contour integral along the rays arg t = +-pi/3,
//               Ai(z) = 1/(2 pi i) int exp(t^3/3 - z t) dt.
//   otherwise : Laplace-type integral
//               Ai(z) = exp(-zeta) zeta^{-1/6} / (sqrt(pi) 48^{1/6} Gamma(5/6))
//                       * int_0^inf exp(-t) t^{-1/6} (2 + t/zeta)^{-1/6} dt,
//               with the t-path rotated away from the branch point t = -2 zeta,
//               which extends it to |arg z| <= 3pi/4; beyond that the
//               connection formula Ai(z) = -w Ai(w z) - w^2 Ai(w^2 z) is used.

#include <cmath>
#include <complex>
#include <numbers>

#include "gauss_legendre.hpp"

namespace bohmflow::oracle {

inline std::complex<double> airy_ray_contour(std::complex<double> z) {
  using cd = std::complex<double>;
  const cd up = std::polar(1.0, std::numbers::pi / 3);
  const cd dn = std::conj(up);
  auto ray = [&](cd dir) {
    return composite_gl([&](double r) { return std::exp(-r * r * r / 3.0 - z * r * dir); }, 0.0, 8.0,
                        40);
  };
  return (up * ray(up) - dn * ray(dn)) / cd(0, 2 * std::numbers::pi);
}

inline std::complex<double> airy_laplace(std::complex<double> z) {
  using cd = std::complex<double>;
  const cd root = std::sqrt(z);
  const cd zeta = (2.0 / 3.0) * z * root;
  // The branch point t* = -2 zeta reaches the positive real axis when
  // |arg z| = 2pi/3; keeping the path on the side it approaches from (above
  // for arg z > 0) follows the analytic continuation past that line.
  double phi = 0;
  if (zeta.real() <= 0) phi = std::arg(z) >= 0 ? std::numbers::pi / 3 : -std::numbers::pi / 3;
  const cd dir = std::polar(1.0, phi);
  // t = u^6 dir removes the t^{-1/6} endpoint singularity.
  const double upper = std::pow(120.0 / std::cos(phi), 1.0 / 6.0);
  const cd integral = composite_gl(
      [&](double u) {
        const double u2 = u * u;
        const double u6 = u2 * u2 * u2;
        const cd t = u6 * dir;
        return 6.0 * u2 * u2 * std::exp(-t) * std::pow(dir, -1.0 / 6.0) * dir *
               std::pow(2.0 + t / zeta, -1.0 / 6.0);
      },
      0.0, upper, 80);
  // zeta^{-1/6} computed on the branch continuous with z^{-1/4}.
  const cd zeta_m16 = std::pow(2.0 / 3.0, -1.0 / 6.0) / std::sqrt(root);
  const double norm = std::sqrt(std::numbers::pi) * std::pow(48.0, 1.0 / 6.0) * std::tgamma(5.0 / 6.0);
  return std::exp(-zeta) * zeta_m16 * integral / norm;
}

inline std::complex<double> airy_quadrature(std::complex<double> z) {
  using cd = std::complex<double>;
  if (std::abs(z) < 1.5) return airy_ray_contour(z);
  if (std::abs(std::arg(z)) <= 0.75 * std::numbers::pi) return airy_laplace(z);
  const cd omega = std::polar(1.0, 2 * std::numbers::pi / 3);
  return -omega * airy_laplace(omega * z) - omega * omega * airy_laplace(omega * omega * z);
}

}  // namespace bohmflow::oracle
