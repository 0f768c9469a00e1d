// One line per acceptance criterion; exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <string>

#include "bohmflow/airy.hpp"
#include "bohmflow/paraxial.hpp"
#include "bohmflow/propagator.hpp"
#include "bohmflow/runner.hpp"
#include "bohmflow/weak_values.hpp"
#include "oracles/airy_quadrature.hpp"

using namespace bohmflow;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GaussianSpec packet(double c, double s, double k0 = 0.0) {
  GaussianSpec g;
  g.center = Eigen::VectorXd::Constant(1, c);
  g.sigma0 = Eigen::VectorXd::Constant(1, s);
  g.k0 = Eigen::VectorXd::Constant(1, k0);
  return g;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bohmflow_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

struct BuiltinRun {
  RunResult result;
  double seconds = 0;
  std::string rerun_digest;
};

void airy_parabola() {
  const auto t0 = std::chrono::steady_clock::now();
  AirySpec a;
  const Grid g = make_grid({{-26.0, 24.0, 2048}});
  const auto analytic = airy_provider(a, g);
  std::vector<WaveField> frames;
  for (int k = 0; k <= 256; ++k) frames.push_back(apodize(airy_field(a, g, k / 64.0), 12.0, 1.0));
  const GridProvider sampled(frames);
  auto worst = [&](const VelocityProvider& p) {
    double w = 0;
    for (int i = 0; i < 20; ++i) {
      const double x0 = -8.0 + 8.0 * i / 19.0;
      const auto t = integrate(p, {x0, 0.0}, {0.0, 4.0, 0.01, 1});
      if (t.status != TrajectoryStatus::complete) return 1e300;
      for (const auto& s : t.samples) w = std::max(w, std::abs(s.position[0] - x0 - s.xi * s.xi / 4));
    }
    return w;
  };
  const double ea = worst(*analytic), eg = worst(sampled);
  const double secs = seconds_since(t0);
  report(1, ea <= 1e-8 && eg <= 1e-3 && secs <= 10,
         fmt("airy parabola: analytic %.2e (<= 1e-8), grid %.2e (<= 1e-3), %.2f s (<= 10)", ea, eg, secs));
}

void propagator_vs_gaussian() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid g = make_grid({{-32.0, 32.0, 512}});
  const auto p = packet(0.0, 1.0, 1.0);
  const auto psi0 = gaussian_field(p, g, 0.0);
  const double n0 = norm_sq(psi0);
  double drift = 0;
  const SnapshotObserver<double> obs = [&](Index, const WaveField& f) {
    drift = std::max(drift, std::abs(norm_sq(f) - n0));
  };
  const auto out = propagate(psi0, Potential::none(), PropagationPlan{1e-3, 2.0, 1}, obs);
  const double err = (out.final_field.values() - gaussian_field(p, g, 2.0).values()).abs().maxCoeff();
  const double secs = seconds_since(t0);
  report(2, err <= 1e-8 && drift <= 1e-10 && secs <= 5,
         fmt("propagator vs gaussian: Linf %.2e (<= 1e-8), norm drift %.2e (<= 1e-10), %.2f s (<= 5)", err, drift,
             secs));
}

void continuity(const Scenario& s) {
  const double dxi = 1e-2, centre = 1.0;
  const auto psi0 = superposition_field(s.state.packets, s.grid, 0.0, s.state.normalize);
  const auto out = propagate(psi0, Potential::none(), PropagationPlan{dxi / 2, centre + dxi, 1}, {}, true);
  const auto& f = out.snapshots;
  const Index c = static_cast<Index>(std::lround(centre / (dxi / 2)));
  const double r1 = continuity_residual(f[c - 2], f[c], f[c + 2]);
  const double r2 = continuity_residual(f[c - 1], f[c], f[c + 1]);
  const double ratio = r1 / r2;
  report(3, ratio >= 3.5 && ratio <= 4.5 && r1 <= 1e-4,
         fmt("continuity: residual %.2e at dxi=1e-2 (<= 1e-4), %.2e at 5e-3, ratio %.3f (in [3.5, 4.5])", r1, r2,
             ratio));
}

void non_crossing(const BuiltinRun& run) {
  const auto& ts = run.result.trajectories;
  std::size_t sign_changes = 0, incomplete = 0;
  for (const auto& t : ts) {
    if (t.status != TrajectoryStatus::complete) ++incomplete;
    const double x0 = t.samples.front().position[0];
    for (std::size_t k = 1; k < t.samples.size(); ++k) {
      if (std::signbit(t.samples[k].position[0]) != std::signbit(x0)) ++sign_changes;
    }
  }
  const std::size_t inversions = count_crossings(ts);
  report(4, ts.size() == 100 && sign_changes == 0 && inversions == 0 && incomplete == 0,
         fmt("non-crossing (gaussian2): %zu trajectories, %zu sign changes, %zu inversions, %zu incomplete",
             ts.size(), sign_changes, inversions, incomplete));
}

void equivariance(const BuiltinRun& g1, const BuiltinRun& g2) {
  const double ks1 = g1.result.manifest.diagnostics["ensemble"]["ks_statistic"];
  const double ks2 = g2.result.manifest.diagnostics["ensemble"]["ks_statistic"];
  const std::size_t n1 = g1.result.manifest.diagnostics["ensemble"]["n"];
  const std::size_t n2 = g2.result.manifest.diagnostics["ensemble"]["n"];
  report(5, ks1 < 0.01 && ks2 < 0.01 && n1 == 100000 && n2 == 100000 && g1.seconds <= 60 && g2.seconds <= 60,
         fmt("equivariance: KS gaussian1 %.4f, gaussian2 %.4f (< 0.01, n = %zu/%zu), full runs %.1f s / %.1f s (<= 60)",
             ks1, ks2, n1, n2, g1.seconds, g2.seconds));
}

void weak_values() {
  const Grid g = make_grid({{-20.0, 20.0, 1024}});
  const auto p = packet(0.0, 1.0, 0.7);
  const auto f = gaussian_field(p, g, 0.8);
  const auto wx = weak_value_position(f);
  const auto x = g.coordinates(0);
  std::size_t mismatched = 0;
  for (Index j = 0; j < g.size(); ++j) {
    if (!wx.node_mask[j] && wx.values[j] != cd(x[j])) ++mismatched;
  }
  const auto wp = weak_value_momentum(f);
  const auto v = velocity(f);
  const auto u = osmotic_velocity(f);
  // Library fields, and the closed form -i psi'/psi of the sampled packet.
  double dre = 0, dim = 0;
  for (Index j = 0; j < g.size(); ++j) {
    if (wp.node_mask[j]) continue;
    const double pt[2] = {x[j], 0.0};
    const auto e = gaussian_value(p, pt, 0.8);
    const cd exact = cd(0, -1) * e.gradient[0] / e.value;
    dre = std::max({dre, std::abs(wp.values[j].real() - v.velocity(j, 0)), std::abs(wp.values[j].real() - exact.real())});
    dim = std::max({dim, std::abs(wp.values[j].imag() - u(j, 0)), std::abs(wp.values[j].imag() - exact.imag())});
  }
  const auto rec = reconstruct_expectation(f, Observable::momentum);
  const double dk = std::abs(rec.value - 0.7);
  report(6, mismatched == 0 && dre <= 1e-8 && dim <= 1e-8 && dk <= 1e-8,
         fmt("weak values: %zu position mismatches, |Re W - v| %.2e, |Im W + grad rho/(2 rho)| %.2e (library and closed form), "
             "|<p> - 0.7| %.2e (<= 1e-8)",
             mismatched, dre, dim, dk));
}

void entanglement(const BuiltinRun& fact, const BuiltinRun& bell, const Scenario& bell_s) {
  const double df = fact.result.probe.max_deviation;
  const double db = bell.result.probe.max_deviation;
  const double threshold = bell_s.probe.threshold.value_or(0.0);
  report(7, df <= 1e-6 && db > threshold && threshold > 0,
         fmt("entanglement probe: factorizable %.2e (<= 1e-6), bell %.4f (> frozen threshold %.3g)", df, db,
             threshold));
}

void expansions(const BuiltinRun& run, const Scenario& s) {
  const Grid& g = s.grid;
  const auto& p = s.state.packets;
  const double scale = 1 / norm_sq(superposition_field(p, g, 0.0, false));
  const auto x = g.coordinates(0);
  double drho = 0, dj = 0;
  for (const auto& f : run.result.snapshots) {
    const double t = f.xi();
    const auto rho = density(f);
    const auto j = current(f);
    for (Index q = 0; q < g.size(); ++q) {
      const double pt[2] = {x[q], 0.0};
      const auto a = gaussian_value(p[0], pt, t), b = gaussian_value(p[1], pt, t);
      const cd la = a.gradient[0] / a.value, lb = b.gradient[0] / b.value;
      const double aa = std::abs(a.value), ab = std::abs(b.value);
      const double phi = std::arg(b.value) - std::arg(a.value);
      const double rho_exp = scale * (aa * aa + ab * ab + 2 * aa * ab * std::cos(phi));
      const double j_exp = scale * (aa * aa * la.imag() + ab * ab * lb.imag() +
                                    aa * ab * (la.imag() + lb.imag()) * std::cos(phi) +
                                    (aa * ab * lb.real() - ab * aa * la.real()) * std::sin(phi));
      drho = std::max(drho, std::abs(rho[q] - rho_exp));
      dj = std::max(dj, std::abs(j(q, 0) - j_exp));
    }
  }
  report(8, drho <= 1e-8 && dj <= 1e-8,
         fmt("superposition expansions over %zu gaussian2 snapshots: density %.2e, current %.2e (<= 1e-8)",
             run.result.snapshots.size(), drho, dj));
}

void quantum_potential_check() {
  const double s = 1.0;
  const Grid g = make_grid({{-20.0, 20.0, 1024}});
  const auto f = gaussian_field(packet(0.0, s), g, 0.0);
  const auto q = quantum_potential(f);
  const auto x = g.coordinates(0);
  double worst = 0;
  for (Index j = 0; j < g.size(); ++j) {
    if (std::abs(x[j]) > 4 * s) continue;
    worst = std::max(worst, std::abs(q[j] - (1 / (4 * s * s) - x[j] * x[j] / (8 * s * s * s * s))));
  }
  report(9, worst <= 1e-6, fmt("quantum potential of a real gaussian on |x| <= 4 sigma: %.2e (<= 1e-6)", worst));
}

void airy_function() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0, reflection = 0;
  for (int i = 0; i < 200; ++i) {
    const cd w = std::polar(kAiryDomainRadius * std::sqrt(u(rng)), 2 * std::numbers::pi * u(rng));
    const cd got = complex_airy(w);
    const double scale = std::max(std::abs(got), airy_envelope(w));
    worst = std::max(worst, std::abs(got - oracle::airy_quadrature(w)) / scale);
    reflection = std::max(reflection, std::abs(complex_airy(std::conj(w)) - std::conj(got)) / scale);
  }
  report(10, worst <= 1e-10 && reflection <= 1e-15,
         fmt("complex_airy on 200 points of |w| <= %.0f: relative %.2e (<= 1e-10), reflection %.2e", kAiryDomainRadius,
             worst, reflection));
}

}  // namespace

int main() {
  try {
    airy_parabola();
    propagator_vs_gaussian();

    std::map<std::string, Scenario> scen;
    std::map<std::string, BuiltinRun> runs;
    for (const auto& name : list_builtins()) {
      scen.emplace(name, load_scenario("builtin:" + name));
      const auto t0 = std::chrono::steady_clock::now();
      BuiltinRun r{run_scenario(scen.at(name), scratch(name + "_a")), 0.0, ""};
      r.seconds = seconds_since(t0);
      runs.emplace(name, std::move(r));
      fs::remove_all(scratch(name + "_a"));
    }

    continuity(scen.at("gaussian2"));
    non_crossing(runs.at("gaussian2"));
    equivariance(runs.at("gaussian1"), runs.at("gaussian2"));
    weak_values();
    entanglement(runs.at("factorizable"), runs.at("bell"), scen.at("bell"));
    expansions(runs.at("gaussian2"), scen.at("gaussian2"));
    quantum_potential_check();
    airy_function();

    std::string diffs;
    for (const auto& name : list_builtins()) {
      const fs::path dir = scratch(name + "_b");
      const std::string again = run_scenario(load_scenario("builtin:" + name), dir).manifest.digest;
      fs::remove_all(dir);
      if (again != runs.at(name).result.manifest.digest) diffs += " " + name;
    }
    report(11, diffs.empty(),
           fmt("determinism: %zu builtins rerun, digest mismatches:%s", runs.size(),
               diffs.empty() ? " none" : diffs.c_str()));
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
