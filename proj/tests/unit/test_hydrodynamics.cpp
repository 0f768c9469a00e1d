#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "bohmflow/hydrodynamics.hpp"
#include "bohmflow/states.hpp"

using namespace bohmflow;

namespace {

GaussianSpec packet(double c, double s, double k0 = 0.0) {
  GaussianSpec g;
  g.center = Eigen::VectorXd::Constant(1, c);
  g.sigma0 = Eigen::VectorXd::Constant(1, s);
  g.k0 = Eigen::VectorXd::Constant(1, k0);
  return g;
}

WaveField plane_wave(const Grid& g, int k_index) {
  const double k = 2 * std::numbers::pi * k_index / g.axis(0).length();
  const auto x = g.coordinates(0);
  ComplexArray<double> v(g.size());
  for (Index j = 0; j < g.size(); ++j) v[j] = std::polar(1.0, k * x[j]);
  return {g, 0.0, v};
}

}  // namespace

TEST_CASE("plane wave: uniform velocity, no quantum potential, no osmotic flow") {
  const Grid g = make_grid({{0.0, 10.0, 128}});
  const auto f = plane_wave(g, 5);
  const double k = std::numbers::pi;
  const auto h = hydro_fields(f);
  CHECK((h.velocity.col(0) - k).abs().maxCoeff() < 1e-12);
  CHECK((h.current.col(0) - k).abs().maxCoeff() < 1e-12);
  CHECK(h.q_potential.abs().maxCoeff() < 1e-12);
  CHECK(h.osmotic.col(0).abs().maxCoeff() < 1e-12);
  CHECK(h.masked_count() == 0);
}

TEST_CASE("quantum potential of a real gaussian") {
  const double s = 0.8;
  const Grid g = make_grid({{-20.0, 20.0, 1024}});
  const auto f = gaussian_field(packet(0.0, s), g, 0.0);
  const auto q = quantum_potential(f);
  const auto x = g.coordinates(0);
  double worst = 0;
  for (Index j = 0; j < g.size(); ++j) {
    if (std::abs(x[j]) > 3 * s) continue;
    worst = std::max(worst, std::abs(q[j] - (1 / (4 * s * s) - x[j] * x[j] / (8 * s * s * s * s))));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("spreading gaussian velocity, current and osmotic term") {
  const double s = 0.6, c = 0.5, k0 = 0.7, t = 1.4;
  const Grid g = make_grid({{-30.0, 30.0, 2048}});
  const auto f = gaussian_field(packet(c, s, k0), g, t);
  const auto h = hydro_fields(f);
  const auto x = g.coordinates(0);
  const double w = gaussian_width(s, t);
  double dv = 0, du = 0, dj = 0;
  for (Index j = 0; j < g.size(); ++j) {
    const double u = x[j] - c - k0 * t;
    if (std::abs(u) > 4 * w) continue;
    dv = std::max(dv, std::abs(h.velocity(j, 0) - (k0 + u * t / (4 * s * s * s * s + t * t))));
    du = std::max(du, std::abs(h.osmotic(j, 0) - u / (2 * w * w)));
    dj = std::max(dj, std::abs(h.current(j, 0) - h.rho[j] * h.velocity(j, 0)));
  }
  CHECK(dv < 1e-9);
  CHECK(du < 1e-9);
  CHECK(dj < 1e-14);
  // The separate entry points agree with the combined pass.
  CHECK((velocity(f).velocity - h.velocity).abs().maxCoeff() < 1e-14);
  CHECK((current(f) - h.current).abs().maxCoeff() < 1e-14);
  CHECK((quantum_potential(f) - h.q_potential).abs().maxCoeff() < 1e-10);
  CHECK((osmotic_velocity(f) - h.osmotic).abs().maxCoeff() < 1e-14);
}

TEST_CASE("2D packet has per-axis velocities") {
  GaussianSpec p;
  p.center = Eigen::Vector2d(0.0, 1.0);
  p.sigma0 = Eigen::Vector2d(0.7, 0.9);
  p.k0 = Eigen::Vector2d(0.5, -0.4);
  const Grid g = make_grid({{-12.0, 12.0, 192}, {-12.0, 12.0, 160}});
  const double t = 0.8;
  const auto h = hydro_fields(gaussian_field(p, g, t));
  const auto x = g.coordinates(0), y = g.coordinates(1);
  double worst = 0;
  for (Index q = 0; q < g.size(); ++q) {
    const double ux = x[q] - 0.5 * t, uy = y[q] - 1.0 + 0.4 * t;
    if (std::hypot(ux, uy) > 2.5) continue;
    worst = std::max(worst, std::abs(h.velocity(q, 0) - (0.5 + ux * t / (4 * std::pow(0.7, 4) + t * t))));
    worst = std::max(worst, std::abs(h.velocity(q, 1) - (-0.4 + uy * t / (4 * std::pow(0.9, 4) + t * t))));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("node mask zeroes low-density points") {
  const Grid g = make_grid({{-8.0, 8.0, 256}});
  const auto f = gaussian_field(packet(0.0, 0.5), g, 0.0);
  const auto h = hydro_fields(f);
  const auto x = g.coordinates(0);
  // rho / max rho = exp(-x^2 / 2 s^2) < 1e-12  <=>  |x| > 0.5 sqrt(24 ln 10)
  const double edge = 0.5 * std::sqrt(24 * std::log(10.0));
  for (Index j = 0; j < g.size(); ++j) {
    if (std::abs(std::abs(x[j]) - edge) < 0.05) continue;
    CHECK(h.node_mask[j] == (std::abs(x[j]) > edge));
    if (h.node_mask[j]) {
      CHECK(h.velocity(j, 0) == 0.0);
      CHECK(h.q_potential[j] == 0.0);
    }
  }
  CHECK_THROWS_AS(node_mask(h.rho, 0.0), ValidationError);
  CHECK_THROWS_AS(node_mask(h.rho, 0.01), ValidationError);
}

TEST_CASE("phase along a line is unwrapped") {
  const Grid g = make_grid({{0.0, 10.0, 128}});
  const auto f = plane_wave(g, 7);  // total phase 14 pi across the box
  const auto s = phase_line(f, 0, 10);
  const auto x = g.coordinates(0);
  const double k = 2 * std::numbers::pi * 7 / 10.0;
  CHECK((s - k * (x - x[10])).abs().maxCoeff() < 1e-11);

  ComplexArray<double> v = f.values();
  v[40] = 0;
  const WaveField holed(g, 0.0, v);
  CHECK_THROWS_AS(phase_line(holed, 0, 10), NodeOnLine);
  CHECK_NOTHROW(phase_line(holed, 0, 10, 0, Index{0}, Index{39}));
  CHECK_THROWS_AS(phase_line(f, 0, 200), ValidationError);

  const Grid g2 = make_grid({{0.0, 10.0, 32}, {0.0, 10.0, 128}});
  const auto y = g2.coordinates(1);
  ComplexArray<double> w(g2.size());
  for (Index q = 0; q < g2.size(); ++q) w[q] = std::polar(1.0, k * y[q]);
  const auto sy = phase_line(WaveField(g2, 0.0, w), 1, 0, 5);
  CHECK(std::abs(sy[127] - k * g2.axis(1).coordinate(127)) < 1e-11);
}

TEST_CASE("continuity residual is second order in the time step") {
  const Grid g = make_grid({{-30.0, 30.0, 1024}});
  const auto p = packet(-1.0, 0.7, 0.9);
  auto residual = [&](double h) {
    return continuity_residual(gaussian_field(p, g, 1.0 - h), gaussian_field(p, g, 1.0),
                               gaussian_field(p, g, 1.0 + h));
  };
  const double r1 = residual(0.02), r2 = residual(0.01);
  CHECK(r2 < 1e-4);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.05));
}

namespace {

/// Amplitude, phase gradient and amplitude gradient of one closed-form packet.
struct Polar {
  double rho, grad_s, grad_a, s;
};

Polar polar_of(const GaussianSpec& g, double x, double t) {
  const double p[2] = {x, 0.0};
  const auto v = gaussian_value(g, p, t);
  const cd dlog = v.gradient[0] / v.value;  // grad A / A + i grad S
  const double a = std::abs(v.value);
  return {a * a, dlog.imag(), a * dlog.real(), std::arg(v.value)};
}

}  // namespace

TEST_CASE("density and current of a two-packet superposition equal their interference expansions") {
  const Grid g = make_grid({{-32.0, 32.0, 1024}});
  const GaussianSpec p1 = packet(-2.5, 0.5), p2 = packet(2.5, 0.5);
  const std::vector<GaussianSpec> both = {p1, p2};
  const auto x = g.coordinates(0);
  for (double t : {0.0, 0.5, 1.5, 3.0}) {
    const auto f = superposition_field(both, g, t, false);
    const auto rho = density(f);
    const auto j = current(f);
    double drho = 0, dj = 0;
    for (Index q = 0; q < g.size(); ++q) {
      const Polar a = polar_of(p1, x[q], t), b = polar_of(p2, x[q], t);
      const double phi = b.s - a.s;
      const double root = std::sqrt(a.rho * b.rho);
      const double rho_exp = a.rho + b.rho + 2 * root * std::cos(phi);
      const double amp_a = std::sqrt(a.rho), amp_b = std::sqrt(b.rho);
      const double j_exp = a.rho * a.grad_s + b.rho * b.grad_s + root * (a.grad_s + b.grad_s) * std::cos(phi) +
                           (amp_a * b.grad_a - amp_b * a.grad_a) * std::sin(phi);
      drho = std::max(drho, std::abs(rho[q] - rho_exp));
      dj = std::max(dj, std::abs(j(q, 0) - j_exp));
    }
    CHECK(drho < 1e-10);
    CHECK(dj < 1e-8);
  }
}

TEST_CASE("unwrapped phase matches the analytic packet phase") {
  const Grid g = make_grid({{-32.0, 32.0, 1024}});
  const auto p = packet(0.0, 0.7, 0.6);
  const double t = 1.2;
  const auto f = gaussian_field(p, g, t);
  const Index anchor = 512;
  const auto s = phase_line(f, 0, anchor, 0, Index{400}, Index{640});
  const auto x = g.coordinates(0);
  double worst = 0;
  for (Index q = 400; q <= 640; ++q) {
    const double ds = polar_of(p, x[q], t).s - polar_of(p, x[anchor], t).s;
    worst = std::max(worst, std::abs(std::remainder(s[q] - ds, 2 * std::numbers::pi)));
  }
  CHECK(worst < 1e-10);
  // grad S from the unwrapped phase reproduces the velocity.
  const auto h = hydro_fields(f);
  double dv = 0;
  for (Index q = 420; q <= 620; ++q) {
    dv = std::max(dv, std::abs((s[q + 1] - s[q - 1]) / (2 * g.axis(0).dx()) - h.velocity(q, 0)));
  }
  CHECK(dv < 1e-2);  // second-order differences with dx = 1/16
}

TEST_CASE("first moment moves with the integrated current") {
  const Grid g = make_grid({{-32.0, 32.0, 1024}});
  const std::vector<GaussianSpec> ps = {packet(-2.0, 0.6, 0.8), packet(1.5, 0.5, -0.3)};
  const double t = 1.0, h = 1e-3;
  auto moment = [&](double tt) {
    const auto rho = density(superposition_field(ps, g, tt, true));
    return (rho * g.coordinates(0)).sum() * g.axis(0).dx();
  };
  const double dmean = (moment(t + h) - moment(t - h)) / (2 * h);
  const double jtot = current(superposition_field(ps, g, t, true)).col(0).sum() * g.axis(0).dx();
  CHECK(std::abs(dmean - jtot) < 1e-6);
}

TEST_CASE("quantum Hamilton-Jacobi equation along a line") {
  const Grid g = make_grid({{-32.0, 32.0, 1024}});
  const auto p = packet(0.3, 0.8, 0.4);
  const double t = 1.0, h = 1e-3;
  const Index anchor = 512, lo = 460, hi = 564;
  // S carries an x-independent phase that phase_line anchors away, so the
  // anchor's own dS/dt is restored from the analytic phase.
  auto line = [&](double tt) { return phase_line(gaussian_field(p, g, tt), 0, anchor, 0, Index{lo}, Index{hi}); };
  const auto s_minus = line(t - h), s_plus = line(t + h);
  const auto x = g.coordinates(0);
  const double anchor_rate = std::remainder(polar_of(p, x[anchor], t + h).s - polar_of(p, x[anchor], t - h).s,
                                            2 * std::numbers::pi) / (2 * h);
  const auto hf = hydro_fields(gaussian_field(p, g, t));
  double worst = 0;
  for (Index q = lo; q <= hi; ++q) {
    const double ds_dt = (s_plus[q] - s_minus[q]) / (2 * h) + anchor_rate;
    const double v = hf.velocity(q, 0);
    worst = std::max(worst, std::abs(-ds_dt - (0.5 * v * v + hf.q_potential[q])));
  }
  CHECK(worst < 1e-4);
}
