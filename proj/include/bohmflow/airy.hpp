#pragma once

#include <complex>

namespace bohmflow {

/// Radius of the disk on which complex_airy is documented and tested.
inline constexpr double kAiryDomainRadius = 30.0;

struct AiryValue {
  std::complex<double> ai;
  std::complex<double> dai;  // Ai'(w)
};

/// Ai(w) for complex w with |w| <= kAiryDomainRadius, relative accuracy
/// ~1e-13 away from the real zeros. Throws SpecialFunctionError outside the
/// domain or on non-finite input.
std::complex<double> complex_airy(std::complex<double> w);

/// Ai(w) together with Ai'(w); same domain as complex_airy.
AiryValue airy_with_derivative(std::complex<double> w);

/// Magnitude scale of Ai near w that stays positive across the real zeros:
/// the modulus of the leading asymptotic term(s). Used to express errors
/// relative to the local size of the function.
double airy_envelope(std::complex<double> w);

}  // namespace bohmflow
