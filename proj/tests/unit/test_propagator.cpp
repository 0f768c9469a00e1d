#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "bohmflow/propagator.hpp"
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

Potential harmonic(const Grid& g, double omega, double center = 0.0) {
  return Potential::sampled(0.5 * omega * omega * (g.coordinates(0) - center).square());
}

double max_diff(const WaveField& a, const WaveField& b) { return (a.values() - b.values()).abs().maxCoeff(); }

}  // namespace

TEST_CASE("free evolution is exact for any step") {
  const Grid grid = make_grid({{-40.0, 40.0, 2048}});
  const auto g = packet(-1.0, 0.5, 1.5);
  const auto psi0 = gaussian_field(g, grid, 0.0);
  const auto exact = gaussian_field(g, grid, 3.0);
  CHECK(max_diff(step(psi0, Potential::none(), 3.0), exact) < 1e-12);
  const auto many = propagate(psi0, Potential::none(), PropagationPlan{0.01, 3.0, 1});
  CHECK(many.plan.steps == 300);
  CHECK(many.final_field.xi() == 3.0);
  CHECK(max_diff(many.final_field, exact) < 1e-11);
}

TEST_CASE("norm is conserved with a potential") {
  const Grid grid = make_grid({{-16.0, 16.0, 512}});
  const auto psi0 = gaussian_field(packet(2.0, 0.7, -1.0), grid, 0.0);
  const auto r = propagate(psi0, harmonic(grid, 1.0), PropagationPlan{1e-3, 2.0, 100});
  CHECK(std::abs(norm_sq(r.final_field) - norm_sq(psi0)) < 1e-12);
}

TEST_CASE("a step followed by its negative restores the field") {
  const Grid grid = make_grid({{-16.0, 16.0, 512}});
  const auto psi0 = gaussian_field(packet(0.5, 0.6, 0.8), grid, 0.0);
  const auto pot = harmonic(grid, 1.3, 0.2);
  const auto back = step(step(psi0, pot, 0.05), pot, -0.05);
  CHECK(max_diff(back, psi0) < 1e-13);
}

TEST_CASE("harmonic ground state is stationary and a coherent state oscillates") {
  const Grid grid = make_grid({{-16.0, 16.0, 512}});
  const double omega = 1.0;
  const auto ground = gaussian_field(packet(0.0, std::sqrt(0.5 / omega), 0.0), grid, 0.0);
  const auto r = propagate(ground, harmonic(grid, omega), PropagationPlan{1e-3, 2.0, 1000});
  const cd phase = std::exp(cd(0, -0.5 * omega * 2.0));
  CHECK((r.final_field.values() - phase * ground.values()).abs().maxCoeff() < 1e-6);  // O(h^2) splitting error, h = 1e-3

  // Displaced ground state: the centroid follows a cos(omega xi).
  const auto coherent = gaussian_field(packet(3.0, std::sqrt(0.5 / omega), 0.0), grid, 0.0);
  const auto rc = propagate(coherent, harmonic(grid, omega), PropagationPlan{1e-3, std::numbers::pi / 2, 1});
  const auto rho = rc.final_field.values().abs2();
  const double mean = (rho * grid.coordinates(0)).sum() * grid.axis(0).dx();
  CHECK(std::abs(mean) < 1e-6);
}

TEST_CASE("split-step error is second order in the step") {
  const Grid grid = make_grid({{-16.0, 16.0, 512}});
  const auto psi0 = gaussian_field(packet(2.0, 0.5, 0.0), grid, 0.0);
  const auto pot = harmonic(grid, 1.0);
  const auto ref = propagate(psi0, pot, PropagationPlan{1.0 / 1600, 1.0, 1}).final_field;
  const double e1 = max_diff(propagate(psi0, pot, PropagationPlan{1.0 / 50, 1.0, 1}).final_field, ref);
  const double e2 = max_diff(propagate(psi0, pot, PropagationPlan{1.0 / 100, 1.0, 1}).final_field, ref);
  CHECK(e1 / e2 > 3.6);
  CHECK(e1 / e2 < 4.4);
}

TEST_CASE("plan resolution lands on xi_end") {
  const Grid grid = make_grid({{-1.0, 1.0, 64}});
  auto r = resolve_plan(PropagationPlan{0.3, 1.0, 1}, 0.0, grid);
  CHECK(r.steps == 4);
  CHECK(r.d_xi == doctest::Approx(0.25));
  CHECK(r.xi_at(4) == 1.0);
  r = resolve_plan(PropagationPlan{0.1, 1.0, 1}, 0.0, grid);
  CHECK(r.steps == 10);  // 1/0.1 is not exactly 10 in binary
  CHECK(r.stability_bound == doctest::Approx(0.5 * (2.0 / 64) * (2.0 / 64)));
  CHECK_FALSE(r.within_bound);
  CHECK(resolve_plan(PropagationPlan{0.1, 0.0, 1}, 0.0, grid).steps == 0);
  CHECK_THROWS_AS(resolve_plan(PropagationPlan{0.0, 1.0, 1}, 0.0, grid), ValidationError);
  CHECK_THROWS_AS(resolve_plan(PropagationPlan{0.1, -1.0, 1}, 0.0, grid), ValidationError);
  CHECK_THROWS_AS(resolve_plan(PropagationPlan{0.1, 1.0, 0}, 0.0, grid), ValidationError);
}

TEST_CASE("snapshots arrive at step 0, every stride and the last step") {
  const Grid grid = make_grid({{-8.0, 8.0, 128}});
  const auto psi0 = gaussian_field(packet(0.0, 1.0), grid, 0.0);
  std::vector<Index> seen;
  const auto r = propagate(psi0, Potential::none(), PropagationPlan{0.1, 1.0, 3},
                           SnapshotObserver<double>([&](Index k, const WaveField&) { seen.push_back(k); }), true);
  CHECK(seen == std::vector<Index>{0, 3, 6, 9, 10});
  REQUIRE(r.snapshots.size() == 5);
  CHECK(r.snapshots[2].xi() == 0.6000000000000001);
  CHECK(r.snapshots.back().xi() == 1.0);
}

TEST_CASE("potential validation") {
  const Grid grid = make_grid({{-8.0, 8.0, 128}});
  const Grid other = make_grid({{-8.0, 8.0, 64}});
  CHECK_THROWS_AS(SplitStepPropagator<double>(grid, harmonic(other, 1.0), 0.1), GridMismatch);
  RealArray<double> bad = RealArray<double>::Zero(128);
  bad[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Potential::sampled(bad), ValidationError);
}

TEST_CASE("bell state propagated to xi = 10 matches the closed form") {
  const Grid grid = make_grid({{-80.0, 80.0, 1280}, {-80.0, 80.0, 1280}});
  const BellSpec b;
  const auto psi0 = bell_field(b, grid, 0.0);
  const auto r = propagate(psi0, Potential::none(), PropagationPlan{2.5, 10.0, 4});
  CHECK(max_diff(r.final_field, bell_field(b, grid, 10.0)) < 1e-6);
  CHECK(std::abs(norm_sq(r.final_field) - 1.0) < 1e-12);
}
