#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bohmflow/airy.hpp"
#include "bohmflow/errors.hpp"
#include "oracles/airy_quadrature.hpp"

using namespace bohmflow;
using cd = std::complex<double>;

namespace {

double envelope_error(cd got, cd want, cd w) { return std::abs(got - want) / std::max(std::abs(want), airy_envelope(w)); }

std::vector<cd> disk_sample(std::size_t n, std::uint64_t seed, double radius) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<cd> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::polar(radius * std::sqrt(u(rng)), 2 * std::numbers::pi * u(rng)));
  return out;
}

}  // namespace

TEST_CASE("tabulated real values") {
  struct Row {
    double x, ai, dai;
  };
  // Abramowitz & Stegun, Table 10.11.
  const Row rows[] = {{0.0, 0.3550280538878172, -0.2588194037928068},
                      {1.0, 0.1352924163128814, -0.1591474412967932},
                      {-1.0, 0.5355608832923521, -0.0101605671166456},
                      {2.0, 0.0349241304232744, -0.0530903844336623},
                      {-2.0, 0.2274074282016856, 0.6182590207416910}};
  for (const auto& r : rows) {
    const auto v = airy_with_derivative(r.x);
    CHECK(std::abs(v.ai - r.ai) < 1e-14);
    CHECK(std::abs(v.dai - r.dai) < 1e-14);
  }
}

TEST_CASE("first real zero") {
  const double a1 = -2.338107410459767;
  CHECK(std::abs(complex_airy(a1)) < 1e-14);
}

TEST_CASE("agrees with the quadrature oracle over the documented disk") {
  double worst = 0;
  for (cd w : disk_sample(200, 20240611, kAiryDomainRadius)) {
    worst = std::max(worst, envelope_error(complex_airy(w), oracle::airy_quadrature(w), w));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("agrees with the oracle near the method switch radii") {
  double worst = 0;
  for (double r : {2.999, 3.001, 10.999, 11.001, 29.99}) {
    for (int k = 0; k < 24; ++k) {
      const cd w = std::polar(r, 2 * std::numbers::pi * (k + 0.5) / 24);
      worst = std::max(worst, envelope_error(complex_airy(w), oracle::airy_quadrature(w), w));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("reflection symmetry Ai(conj w) = conj Ai(w)") {
  double worst = 0;
  for (cd w : disk_sample(500, 3, kAiryDomainRadius)) {
    worst = std::max(worst, envelope_error(complex_airy(std::conj(w)), std::conj(complex_airy(w)), w));
  }
  CHECK(worst <= 1e-15);
}

TEST_CASE("real axis gives real values") {
  for (double x = -29.5; x < 29.5; x += 0.37) CHECK(complex_airy(x).imag() == 0.0);
}

TEST_CASE("derivative matches a five-point difference and the Airy equation") {
  double worst_d = 0, worst_ode = 0;
  const double h = 1e-3;
  for (cd w : disk_sample(200, 11, 28.0)) {
    auto f = [](cd z) { return complex_airy(z); };
    auto d = [](cd z) { return airy_with_derivative(z).dai; };
    const cd fd = (-f(w + 2 * h) + 8.0 * f(w + h) - 8.0 * f(w - h) + f(w - 2 * h)) / (12 * h);
    const cd dd = (-d(w + 2 * h) + 8.0 * d(w + h) - 8.0 * d(w - h) + d(w - 2 * h)) / (12 * h);
    const double scale = airy_envelope(w) * (1 + std::abs(w));
    const cd dai = d(w);
    worst_d = std::max(worst_d, std::abs(fd - dai) / std::max(std::abs(dai), scale));
    worst_ode = std::max(worst_ode, std::abs(dd - w * f(w)) / std::max(std::abs(w * f(w)), scale));
  }
  CHECK(worst_d < 1e-7);
  CHECK(worst_ode < 1e-7);
}

TEST_CASE("value and derivative entry points agree") {
  for (cd w : disk_sample(50, 5, kAiryDomainRadius)) CHECK(airy_with_derivative(w).ai == complex_airy(w));
}

TEST_CASE("Wronskian with the rotated solutions") {
  // Ai(w) + e^{2pi i/3} Ai(e^{2pi i/3} w) + e^{-2pi i/3} Ai(e^{-2pi i/3} w) = 0.
  const cd r = std::polar(1.0, 2 * std::numbers::pi / 3);
  double worst = 0;
  for (cd w : disk_sample(100, 9, 12.0)) {
    const cd s = complex_airy(w) + r * complex_airy(r * w) + std::conj(r) * complex_airy(std::conj(r) * w);
    const double scale = std::max({airy_envelope(w), airy_envelope(r * w), airy_envelope(std::conj(r) * w)});
    worst = std::max(worst, std::abs(s) / scale);
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("outside the domain and non-finite input raise") {
  CHECK_THROWS_AS(complex_airy(cd(30.5, 0)), SpecialFunctionError);
  CHECK_THROWS_AS(complex_airy(cd(0, -31)), SpecialFunctionError);
  CHECK_THROWS_AS(complex_airy(cd(NAN, 0)), SpecialFunctionError);
  CHECK_NOTHROW(complex_airy(cd(-30, 0)));
}
