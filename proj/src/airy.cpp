#include "bohmflow/airy.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bohmflow/errors.hpp"

namespace bohmflow {
namespace {

using cd = std::complex<double>;

constexpr double kAi0 = 0.355028053887817239260063186004;
constexpr double kAiPrime0 = -0.258819403792806798405183560189;

// Below this radius the Maclaurin series loses at most ~3 digits.
constexpr double kSeriesRadius = 3.0;
// Above this radius the asymptotic series reaches double precision.
constexpr double kAsymptoticRadius = 11.0;
constexpr double kStepLength = 1.0;

/// Taylor series of the Airy equation y'' = w y about z0, evaluated at z0 + h.
/// Coefficients obey a_{n+2} = (z0 a_n + a_{n-1}) / ((n+1)(n+2)); we carry
/// b_n = a_n h^n directly.
AiryValue taylor_step(cd z0, AiryValue start, cd h) {
  if (h == cd(0)) return start;
  const cd h2 = h * h;
  const cd h3 = h2 * h;
  cd b_prev = 0.0;           // b_{n-1}
  cd b_n = start.ai;         // b_0
  cd b_next = start.dai * h; // b_1
  cd value = b_n + b_next;
  cd deriv_h = b_next;  // sum n b_n
  int quiet = 0;
  for (int n = 0; n < 400; ++n) {
    const cd b_new = (z0 * h2 * b_n + h3 * b_prev) / (double((n + 1) * (n + 2)));
    value += b_new;
    deriv_h += double(n + 2) * b_new;
    b_prev = b_n;
    b_n = b_next;
    b_next = b_new;
    const double scale = std::abs(value) + std::abs(deriv_h);
    const double size = std::abs(b_new) * double(n + 3);
    quiet = (size <= 1e-18 * scale) ? quiet + 1 : 0;
    if (quiet >= 3) break;
  }
  return {value, deriv_h / h};
}

AiryValue maclaurin(cd w) { return taylor_step(0.0, {kAi0, kAiPrime0}, w); }

/// Walk from `from` (where `v` is known) to `to` in straight Taylor steps.
AiryValue integrate_path(cd from, AiryValue v, cd to) {
  const double dist = std::abs(to - from);
  const int steps = std::max(1, static_cast<int>(std::ceil(dist / kStepLength)));
  const cd h = (to - from) / double(steps);
  cd z = from;
  for (int s = 0; s < steps; ++s) {
    v = taylor_step(z, v, h);
    z = from + double(s + 1) * h;
  }
  return v;
}

/// u_k and v_k of the Airy asymptotic expansions.
struct AsymptoticCoefficients {
  static constexpr int kCount = 64;
  std::array<double, kCount> u{};
  std::array<double, kCount> v{};
  AsymptoticCoefficients() {
    u[0] = 1.0;
    v[0] = 1.0;
    for (int k = 1; k < kCount; ++k) {
      const double kk = k;
      u[k] = u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216 * kk);
      v[k] = -u[k] * (6 * kk + 1) / (6 * kk - 1);
    }
  }
};

const AsymptoticCoefficients& coefficients() {
  static const AsymptoticCoefficients c;
  return c;
}

/// sum_k (-1)^k c_k zeta^{-k} over k = first, first+2, ... (parity-filtered
/// when `stride` == 2), truncated at the smallest term.
cd asymptotic_sum(const std::array<double, AsymptoticCoefficients::kCount>& c, cd zeta, int first,
                  int stride) {
  const cd inv = 1.0 / zeta;
  const cd inv_stride = stride == 1 ? inv : inv * inv;
  cd power = first == 0 ? cd(1.0) : inv;
  cd sum = 0.0;
  double last = INFINITY;
  for (int k = first; k < AsymptoticCoefficients::kCount; k += stride) {
    const double sign = ((k / stride) % 2 == 0) ? 1.0 : -1.0;
    const cd term = sign * c[static_cast<std::size_t>(k)] * power;
    const double mag = std::abs(term);
    if (mag > last) break;
    sum += term;
    if (mag <= 1e-18 * std::abs(sum)) break;
    last = mag;
    power *= inv_stride;
  }
  return sum;
}

/// Large-|w| expansions. The exponentially decaying form is used for
/// |arg w| <= 2pi/3; across the negative axis the oscillatory form is used,
/// which accounts for both exponentials beyond the Stokes line.
AiryValue asymptotic(cd w) {
  const auto& c = coefficients();
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  if (std::abs(std::arg(w)) <= 2.0 * std::numbers::pi / 3.0) {
    const cd root = std::sqrt(w);
    const cd quarter = std::sqrt(root);
    const cd zeta = (2.0 / 3.0) * w * root;
    const cd e = std::exp(-zeta);
    // Alternating sign convention: (-1)^k with k counted directly (stride 1).
    const cd su = asymptotic_sum(c.u, zeta, 0, 1);
    const cd sv = asymptotic_sum(c.v, zeta, 0, 1);
    return {0.5 * inv_sqrt_pi * e / quarter * su, -0.5 * inv_sqrt_pi * quarter * e * sv};
  }
  const cd z = -w;
  const cd root = std::sqrt(z);
  const cd quarter = std::sqrt(root);
  const cd zeta = (2.0 / 3.0) * z * root;
  const cd theta = zeta - std::numbers::pi / 4.0;
  // Even/odd sub-series carry their own (-1)^k with k = index/2.
  const cd pu = asymptotic_sum(c.u, zeta, 0, 2);
  const cd qu = asymptotic_sum(c.u, zeta, 1, 2);
  const cd pv = asymptotic_sum(c.v, zeta, 0, 2);
  const cd qv = asymptotic_sum(c.v, zeta, 1, 2);
  const cd cs = std::cos(theta);
  const cd sn = std::sin(theta);
  return {inv_sqrt_pi / quarter * (cs * pu + sn * qu), inv_sqrt_pi * quarter * (sn * pv - cs * qv)};
}

void check_domain(cd w) {
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
    throw SpecialFunctionError("complex_airy: non-finite argument");
  }
  if (std::abs(w) > kAiryDomainRadius) {
    std::ostringstream msg;
    msg << "complex_airy: |w| = " << std::abs(w) << " outside documented domain |w| <= "
        << kAiryDomainRadius;
    throw SpecialFunctionError(msg.str());
  }
}

}  // namespace

AiryValue airy_with_derivative(std::complex<double> w) {
  check_domain(w);
  const double r = std::abs(w);
  if (r <= kSeriesRadius) return maclaurin(w);
  if (r >= kAsymptoticRadius) return asymptotic(w);
  const cd dir = w / r;
  if (std::abs(std::arg(w)) < std::numbers::pi / 3.0) {
    // Ai decays outward here, so integrate inward from the asymptotic circle.
    const cd start = kAsymptoticRadius * dir;
    return integrate_path(start, asymptotic(start), w);
  }
  // Ai is dominant (or neutral) outward: march out from the series disk.
  const cd start = kSeriesRadius * dir;
  return integrate_path(start, maclaurin(start), w);
}

std::complex<double> complex_airy(std::complex<double> w) { return airy_with_derivative(w).ai; }

double airy_envelope(std::complex<double> w) {
  const double r = std::max(std::abs(w), 1.0);
  const cd root = std::sqrt(w);
  const cd zeta = (2.0 / 3.0) * w * root;
  double mag = std::exp(-zeta.real());
  if (std::abs(std::arg(w)) > 2.0 * std::numbers::pi / 3.0) mag += std::exp(zeta.real());
  return mag / (2.0 * std::sqrt(std::numbers::pi) * std::pow(r, 0.25));
}

}  // namespace bohmflow
