#include <map>

#include "bohmflow/scenario.hpp"

namespace bohmflow {
namespace {

const std::map<std::string, std::string>& catalog() {
  static const std::map<std::string, std::string> c{
      {"gaussian1", R"({
  "schema": "bohmflow/1",
  "name": "gaussian1",
  "state": {"kind": "gaussian", "packets": [{"center": 0.0, "sigma0": 0.5}]},
  "grid": {"axes": [{"min": -32.0, "max": 32.0, "n": 1024}]},
  "propagation": {"xi_end": 3.0, "d_xi": 0.0009765625, "snapshot_stride": 8},
  "provider": "grid",
  "trajectories": {"layout": "uniform", "n": 20, "d_xi": 0.01},
  "ensemble": {"n": 100000, "bins": 64, "d_xi": 0.01},
  "seed": 1,
  "outputs": {"fields": ["density", "velocity", "quantum_potential"], "field_every": 48,
              "formats": ["csv", "pgm16"], "cuts": [0.5, 1.0, 2.0, 3.0], "weak_values": true,
              "plot_script": true}
})"},
      {"gaussian2", R"({
  "schema": "bohmflow/1",
  "name": "gaussian2",
  "state": {"kind": "gaussian",
            "packets": [{"center": -2.5, "sigma0": 0.5}, {"center": 2.5, "sigma0": 0.5}]},
  "grid": {"axes": [{"min": -32.0, "max": 32.0, "n": 1024}]},
  "propagation": {"xi_end": 3.0, "d_xi": 0.0009765625, "snapshot_stride": 8},
  "provider": "grid",
  "trajectories": {"layout": "uniform", "n": 100, "d_xi": 0.01},
  "ensemble": {"n": 100000, "bins": 64, "d_xi": 0.01},
  "seed": 2,
  "outputs": {"fields": ["density", "velocity", "quantum_potential"], "field_every": 48,
              "formats": ["csv", "pgm16"], "cuts": [0.5, 1.0, 1.5, 2.0, 2.5, 3.0], "weak_values": true,
              "plot_script": true}
})"},
      {"bell", R"({
  "schema": "bohmflow/1",
  "name": "bell",
  "state": {"kind": "bell", "site_a": -5.0, "site_b": 5.0, "sigma0": 0.5, "parity": 1},
  "grid": {"axes": [{"min": -40.0, "max": 40.0, "n": 640}, {"min": -40.0, "max": 40.0, "n": 640}]},
  "propagation": {"xi_end": 4.0, "d_xi": 0.5, "snapshot_stride": 1},
  "provider": "analytic",
  "trajectories": {"layout": "list", "d_xi": 0.01, "sample_stride": 10,
                   "positions": [[-5.5, 4.5], [-5.5, 5.5], [-4.5, 4.5], [-4.5, 5.5],
                                 [4.5, -5.5], [4.5, -4.5], [5.5, -5.5], [5.5, -4.5]]},
  "probe": {"x0": -4.75, "y0_variants": [5.0, 4.5, 5.5], "d_xi": 0.01, "threshold": 0.1},
  "outputs": {"fields": ["density"], "field_every": 8, "formats": ["csv", "pgm16"], "plot_script": true}
})"},
      {"factorizable", R"({
  "schema": "bohmflow/1",
  "name": "factorizable",
  "state": {"kind": "factorizable", "site_a": -5.0, "site_b": 5.0, "sigma0": 0.5},
  "grid": {"axes": [{"min": -40.0, "max": 40.0, "n": 640}, {"min": -40.0, "max": 40.0, "n": 640}]},
  "propagation": {"xi_end": 4.0, "d_xi": 0.5, "snapshot_stride": 1},
  "provider": "analytic",
  "trajectories": {"layout": "list", "d_xi": 0.01, "sample_stride": 10,
                   "positions": [[-5.5, 4.5], [-5.5, 5.5], [-4.5, 4.5], [-4.5, 5.5],
                                 [4.5, -5.5], [4.5, -4.5], [5.5, -5.5], [5.5, -4.5]]},
  "probe": {"x0": -4.75, "y0_variants": [5.0, 4.5, 5.5], "d_xi": 0.01, "threshold": 1e-6},
  "outputs": {"fields": ["density"], "field_every": 8, "formats": ["csv", "pgm16"], "plot_script": true}
})"},
      {"airy_ideal", R"({
  "schema": "bohmflow/1",
  "name": "airy_ideal",
  "state": {"kind": "airy", "gamma": 0.0, "apodize": {"margin": 12.0, "width": 1.0}},
  "grid": {"axes": [{"min": -26.0, "max": 24.0, "n": 2048}]},
  "propagation": {"xi_end": 4.0, "d_xi": 0.015625, "snapshot_stride": 1},
  "provider": "grid",
  "trajectories": {"layout": "linspace", "range": [-8.0, 0.0], "n": 20, "d_xi": 0.01},
  "outputs": {"fields": ["density", "velocity"], "field_every": 64, "formats": ["csv", "pgm16"],
              "plot_script": true}
})"},
      {"airy_finite", R"({
  "schema": "bohmflow/1",
  "name": "airy_finite",
  "state": {"kind": "airy", "gamma": 0.1, "apodize": {"margin": 12.0, "width": 1.0}},
  "grid": {"axes": [{"min": -26.0, "max": 24.0, "n": 2048}]},
  "frame": {"wavelength": 5e-7, "refractive_index": 1.0, "transverse_scale": 1e-4, "z_end_physical": 0.3},
  "propagation": {"d_xi": 0.015625, "snapshot_stride": 1},
  "provider": "grid",
  "trajectories": {"layout": "linspace", "range": [-8.0, 0.0], "n": 20, "d_xi": 0.01},
  "outputs": {"fields": ["density", "velocity"], "field_every": 32, "formats": ["csv", "pgm16"],
              "plot_script": true}
})"},
      {"airy_counterprop", R"({
  "schema": "bohmflow/1",
  "name": "airy_counterprop",
  "state": {"kind": "counterprop", "beam_a": {"gamma": 0.1, "shift": 5.0},
            "beam_b": {"gamma": 0.1, "shift": 5.0}, "weights": [1.0, 1.0],
            "apodize": {"margin": 8.0, "width": 1.0}},
  "grid": {"axes": [{"min": -20.0, "max": 20.0, "n": 2048}]},
  "propagation": {"xi_end": 3.0, "d_xi": 0.015625, "snapshot_stride": 1},
  "provider": "analytic",
  "trajectories": {"layout": "linspace", "range": [-12.0, 12.0], "n": 24, "d_xi": 0.01},
  "outputs": {"fields": ["density", "velocity"], "field_every": 32, "formats": ["csv", "pgm16"],
              "plot_script": true}
})"},
  };
  return c;
}

}  // namespace

std::vector<std::string> list_builtins() {
  return {"gaussian1", "gaussian2", "bell", "factorizable", "airy_ideal", "airy_finite", "airy_counterprop"};
}

std::string builtin_source(const std::string& name) {
  auto it = catalog().find(name);
  if (it == catalog().end()) throw ValidationError("unknown builtin '" + name + "'");
  return it->second;
}

}  // namespace bohmflow
