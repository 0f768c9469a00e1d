#include "bohmflow/runner.hpp"

#include <cmath>
#include <cstdio>

#include "bohmflow/export.hpp"
#include "bohmflow/propagator.hpp"
#include "bohmflow/weak_values.hpp"

namespace bohmflow {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Writer {
 public:
  explicit Writer(fs::path dir) : dir_(std::move(dir)) {}
  void put(const std::string& name, const std::string& contents) {
    write_file(dir_ / name, contents);
    files_.push_back({name, sha256_hex(contents), contents.size()});
  }
  std::vector<FileRecord>& files() { return files_; }

 private:
  fs::path dir_;
  std::vector<FileRecord> files_;
};

std::string numbered(const std::string& stem, std::size_t i, const std::string& ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%04zu.", i);
  return stem + buf + ext;
}

bool airy_like(const Scenario& s) {
  return s.state.kind == StateKind::airy || s.state.kind == StateKind::counterprop;
}

std::string frame_note(const Scenario& s) {
  if (!s.frame) return "";
  const ParaxialFrame f(s.frame->medium);
  return "frame=lambda0:" + format_real(f.medium().wavelength_vacuum) + ";n:" + format_real(f.medium().refractive_index) +
         ";x0:" + format_real(f.x_unit()) + ";k:" + format_real(f.wavenumber()) + ";z_unit:" + format_real(f.z_unit());
}

WaveField initial_field(const Scenario& s) {
  const double xi = s.propagation.xi_start;
  switch (s.state.kind) {
    case StateKind::gaussian: return superposition_field(s.state.packets, s.grid, xi, s.state.normalize);
    case StateKind::bell: return bell_field(s.state.bell, s.grid, xi);
    case StateKind::factorizable: return factorizable_field(s.state.bell, s.grid, xi);
    default: break;
  }
  throw Error("initial_field: airy states are sampled per snapshot");
}

WaveField airy_snapshot(const Scenario& s, double z) {
  const WaveField raw = s.state.kind == StateKind::airy
                            ? airy_field(s.state.airy, s.grid, z)
                            : counterprop_superposition(s.state.airy, s.state.airy_b, s.grid, z, s.state.weight_a,
                                                        s.state.weight_b);
  return apodize(raw, s.state.apodize.margin, s.state.apodize.width);
}

Potential make_potential(const Scenario& s) {
  const auto& p = s.propagation.potential;
  if (!p.harmonic) return Potential::none();
  RealArray<double> v = RealArray<double>::Zero(s.grid.size());
  for (int a = 0; a < s.grid.dimension(); ++a) {
    v += 0.5 * p.omega * p.omega * (s.grid.coordinates(a) - p.center[static_cast<std::size_t>(a)]).square();
  }
  return Potential::sampled(std::move(v));
}

std::shared_ptr<const VelocityProvider> make_provider(const Scenario& s, const std::vector<WaveField>& snaps) {
  if (s.provider == ProviderMode::grid) return std::make_shared<GridProvider>(snaps, s.eps_node);
  switch (s.state.kind) {
    case StateKind::gaussian: return gaussian_provider(s.state.packets, s.grid, s.propagation.xi_start, s.eps_node);
    case StateKind::bell: return bell_provider(s.state.bell, s.grid, false, s.eps_node);
    case StateKind::factorizable: return bell_provider(s.state.bell, s.grid, true, s.eps_node);
    case StateKind::airy: return airy_provider(s.state.airy, s.grid);
    case StateKind::counterprop:
      return counterprop_provider(s.state.airy, s.state.airy_b, s.grid, s.state.weight_a, s.state.weight_b, s.eps_node);
  }
  throw Error("make_provider: unknown state");
}

/// Sum over y: the x-marginal of 2D grid density as a 1D grid density.
RealArray<double> x_marginal(const Grid& g, const RealArray<double>& rho) {
  const Index nx = g.axis(0).n, ny = g.axis(1).n;
  RealArray<double> m(nx);
  for (Index i = 0; i < nx; ++i) m[i] = rho.segment(i * ny, ny).sum() * g.axis(1).dx();
  return m;
}

std::string trajectory_table(const std::vector<Trajectory>& ts, int dim, const std::string& note) {
  std::size_t rows = 0;
  const Trajectory* longest = nullptr;
  for (const auto& t : ts) {
    if (t.samples.size() > rows) {
      rows = t.samples.size();
      longest = &t;
    }
  }
  std::string out = "# " + note + "\nxi";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out += ",x" + std::to_string(i);
    if (dim == 2) out += ",y" + std::to_string(i);
  }
  out += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    out += format_real(longest->samples[r].xi);
    for (const auto& t : ts) {
      const bool has = r < t.samples.size();
      out += ',' + (has ? format_real(t.samples[r].position[0]) : std::string("nan"));
      if (dim == 2) out += ',' + (has ? format_real(t.samples[r].position[1]) : std::string("nan"));
    }
    out += '\n';
  }
  return out;
}

json status_counts(const std::vector<Trajectory>& ts) {
  std::size_t c = 0, m = 0, o = 0;
  for (const auto& t : ts) {
    if (t.status == TrajectoryStatus::complete) ++c;
    else if (t.status == TrajectoryStatus::masked_stop) ++m;
    else ++o;
  }
  return {{"complete", c}, {"masked_stop", m}, {"out_of_domain", o}};
}

std::string plot_script(const Scenario& s) {
  std::string py =
      "# Plots the data files of this run directory. Usage: python3 plot.py\n"
      "import glob\n"
      "import numpy as np\n"
      "import matplotlib\n"
      "matplotlib.use('Agg')\n"
      "import matplotlib.pyplot as plt\n\n"
      "def load_grid(path):\n"
      "    with open(path, encoding='utf-8') as f:\n"
      "        head = f.readline()\n"
      "    axes = head.split('axes=')[1].split()[0].split(';')\n"
      "    shape = [int(a.split(':')[3]) for a in axes]\n"
      "    ext = [(float(a.split(':')[1]), float(a.split(':')[2])) for a in axes]\n"
      "    data = np.loadtxt(path, comments='#', delimiter=',', ndmin=1)\n"
      "    return data.reshape(shape), ext\n\n";
  if (s.grid.dimension() == 1) {
    py +=
        "fig, ax = plt.subplots()\n"
        "for path in sorted(glob.glob('velocity_x_*.csv')):\n"
        "    v, ext = load_grid(path)\n"
        "    ax.plot(np.linspace(ext[0][0], ext[0][1], v.size, endpoint=False), v, lw=0.8)\n"
        "ax.set_xlabel('x'); ax.set_ylabel('v')\n"
        "fig.savefig('velocity.png', dpi=150)\n\n";
  } else {
    py +=
        "for path in sorted(glob.glob('density_*.csv')):\n"
        "    rho, ext = load_grid(path)\n"
        "    fig, ax = plt.subplots()\n"
        "    ax.imshow(rho.T, origin='lower', extent=[*ext[0], *ext[1]])\n"
        "    fig.savefig(path.replace('.csv', '.png'), dpi=150)\n\n";
  }
  py +=
      "try:\n"
      "    t = np.genfromtxt('trajectories.csv', delimiter=',', names=True, comments='#')\n"
      "    fig, ax = plt.subplots()\n"
      "    for name in t.dtype.names[1:]:\n"
      "        if name.startswith('x'):\n"
      "            ax.plot(t[name], t['xi'], lw=0.6)\n"
      "    ax.set_xlabel('x'); ax.set_ylabel('xi')\n"
      "    fig.savefig('trajectories.png', dpi=150)\n"
      "except OSError:\n"
      "    pass\n";
  return py;
}

}  // namespace

json RunManifest::to_json() const {
  json files_j = json::array();
  for (const auto& f : files) files_j.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return {{"tool", "bohmflow"}, {"version", version},   {"scenario_sha256", scenario_sha256},
          {"scenario", scenario}, {"files", files_j}, {"diagnostics", diagnostics}};
}

std::vector<Point> initial_positions(const Scenario& s, const RealArray<double>& rho0) {
  const auto& t = s.trajectories;
  std::vector<Point> out;
  auto line = [&](double a, double b, std::size_t n, double y) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = n == 1 ? 0.5 * (a + b) : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
      out.push_back({x, y});
    }
  };
  switch (t.layout) {
    case Layout::none: break;
    case Layout::list: out = t.positions; break;
    case Layout::linspace:
      if (t.n == 1) out.push_back({t.range[0], 0.0});
      else line(t.range[0], t.range[1], t.n, 0.0);
      break;
    case Layout::uniform: {
      const std::size_t p = s.state.packets.size();
      for (std::size_t i = 0; i < p; ++i) {
        const auto& g = s.state.packets[i];
        const std::size_t count = t.n / p + (i < t.n % p ? 1 : 0);
        const double y = g.dimension() == 2 ? g.center[1] : 0.0;
        line(g.center[0] - 2 * g.sigma0[0], g.center[0] + 2 * g.sigma0[0], count, y);
      }
      break;
    }
    case Layout::born: out = sample_born(s.grid, rho0, t.n, *s.seed); break;
  }
  return out;
}

RunResult run_scenario(const Scenario& s, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IOError("cannot create " + out_dir.string() + ": " + ec.message());
  Writer w(out_dir);
  RunResult res;
  json diag;
  json warnings = json::array();
  const Grid& g = s.grid;
  const int dim = g.dimension();
  const std::string note = frame_note(s);

  // Snapshots: propagated, or sampled from the Airy closed forms.
  const PropagationPlan plan{s.propagation.d_xi, s.propagation.xi_end, s.propagation.snapshot_stride};
  const auto rp = resolve_plan(plan, s.propagation.xi_start, g);
  diag["plan"] = {{"steps", rp.steps},
                  {"d_xi", rp.d_xi},
                  {"xi_end", rp.xi_end},
                  {"snapshot_stride", rp.snapshot_stride},
                  {"stability_bound", rp.stability_bound},
                  {"within_bound", rp.within_bound}};
  if (s.frame) {
    const ParaxialFrame f(s.frame->medium);
    diag["frame"] = {{"wavenumber", f.wavenumber()}, {"z_unit", f.z_unit()}, {"x_unit", f.x_unit()}};
  }
  if (airy_like(s)) {
    for (Index k = 0; k <= rp.steps; ++k) {
      if (k % rp.snapshot_stride == 0 || k == rp.steps) res.snapshots.push_back(airy_snapshot(s, rp.xi_at(k)));
    }
  } else {
    const WaveField psi0 = initial_field(s);
    const double edge0 = boundary_mass(psi0);
    auto out = propagate(psi0, make_potential(s), plan, {}, true);
    res.snapshots = std::move(out.snapshots);
    const double edge1 = boundary_mass(res.snapshots.back());
    diag["boundary_mass"] = {{"start", edge0}, {"end", edge1}};
    if (std::max(edge0, edge1) > 1e-8) {
      warnings.push_back("probability in the outer 10% of the box exceeds 1e-8; the periodic wrap may be felt");
    }
    const double n0 = norm_sq(psi0);
    double drift = 0;
    for (const auto& f : res.snapshots) drift = std::max(drift, std::abs(norm_sq(f) - n0));
    diag["norm_drift"] = drift;
  }
  if (!rp.within_bound && s.propagation.potential.harmonic) {
    warnings.push_back("d_xi exceeds the recommended bound 0.5 dx^2");
  }
  const auto& snaps = res.snapshots;

  // Field grids.
  const bool csv = std::find(s.outputs.formats.begin(), s.outputs.formats.end(), "csv") != s.outputs.formats.end();
  const bool pgm = std::find(s.outputs.formats.begin(), s.outputs.formats.end(), "pgm16") != s.outputs.formats.end();
  auto wants = [&](const char* f) {
    return std::find(s.outputs.fields.begin(), s.outputs.fields.end(), f) != s.outputs.fields.end();
  };
  static const char* axis_names[] = {"x", "y"};
  std::size_t exported = 0;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    if (s.outputs.fields.empty()) break;
    if (i % static_cast<std::size_t>(s.outputs.field_every) != 0 && i + 1 != snaps.size()) continue;
    const auto& f = snaps[i];
    const auto h = hydro_fields(f, s.eps_node);
    const double xi = f.xi();
    if (csv) {
      if (wants("density")) w.put(numbered("density", i, "csv"), grid_csv(g, xi, h.rho, nullptr, note));
      if (wants("psi")) w.put(numbered("psi", i, "csv"), complex_grid_csv(g, xi, f.values(), note));
      if (wants("quantum_potential")) {
        w.put(numbered("quantum_potential", i, "csv"), grid_csv(g, xi, h.q_potential, &h.node_mask, note));
      }
      for (int a = 0; a < dim; ++a) {
        const std::string ax = axis_names[a];
        if (wants("velocity")) {
          w.put(numbered("velocity_" + ax, i, "csv"), grid_csv(g, xi, h.velocity.col(a), &h.node_mask, note));
        }
        if (wants("current")) w.put(numbered("current_" + ax, i, "csv"), grid_csv(g, xi, h.current.col(a), nullptr, note));
        if (wants("osmotic")) {
          w.put(numbered("osmotic_" + ax, i, "csv"), grid_csv(g, xi, h.osmotic.col(a), &h.node_mask, note));
        }
      }
    }
    if (pgm && dim == 2 && wants("density")) {
      w.put(numbered("density", i, "pgm"), pgm16(h.rho, g.axis(1).n, g.axis(0).n));
    }
    ++exported;
  }
  if (pgm && dim == 1 && wants("density")) {
    const Index nx = g.axis(0).n;
    RealArray<double> img(nx * static_cast<Index>(snaps.size()));
    for (std::size_t i = 0; i < snaps.size(); ++i) img.segment(static_cast<Index>(i) * nx, nx) = snaps[i].values().abs2();
    w.put("density_spacetime.pgm", pgm16(img, nx, static_cast<Index>(snaps.size())));
  }
  diag["exported_snapshots"] = exported;

  // Velocity cuts at the snapshots nearest to the requested xi values.
  if (!s.outputs.cuts.empty()) {
    std::vector<std::size_t> idx;
    std::vector<VelocityResult<double>> vs;
    std::string names = "x";
    std::string listed;
    for (double c : s.outputs.cuts) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < snaps.size(); ++i) {
        if (std::abs(snaps[i].xi() - c) < std::abs(snaps[best].xi() - c)) best = i;
      }
      idx.push_back(best);
      vs.push_back(velocity(snaps[best], s.eps_node));
      names += ",xi=" + format_real(snaps[best].xi());
      listed += (listed.empty() ? "" : ";") + format_real(snaps[best].xi());
    }
    std::string out = "# cuts \xCE\xBE=" + listed + " axes=" + axes_descriptor(g) + (note.empty() ? "" : " " + note) +
                      "\n" + names + "\n";
    for (Index j = 0; j < g.size(); ++j) {
      out += format_real(g.axis(0).coordinate(j));
      for (const auto& v : vs) out += ',' + (v.node_mask[j] ? std::string("nan") : format_real(v.velocity(j, 0)));
      out += '\n';
    }
    w.put("cuts.csv", out);
  }

  // Weak values at the final snapshot.
  if (s.outputs.weak_values) {
    const auto& f = snaps.back();
    const auto wx = weak_value_position(f, 0, s.eps_node);
    const auto wp = weak_value_momentum(f, 0, s.eps_node);
    const auto h = hydro_fields(f, s.eps_node);
    std::string out = "# \xCE\xBE=" + format_real(f.xi()) + " axes=" + axes_descriptor(g) +
                      (note.empty() ? "" : " " + note) + "\nx,position_weak_value,momentum_re,momentum_im,velocity,osmotic,masked\n";
    for (Index j = 0; j < g.size(); ++j) {
      const bool m = wp.node_mask[j];
      auto val = [&](double v) { return m ? std::string("nan") : format_real(v); };
      out += format_real(g.axis(0).coordinate(j)) + ',' + val(wx.values[j].real()) + ',' + val(wp.values[j].real()) +
             ',' + val(wp.values[j].imag()) + ',' + val(h.velocity(j, 0)) + ',' + val(h.osmotic(j, 0)) + ',' +
             (m ? "1" : "0") + '\n';
    }
    w.put("weak_values.csv", out);
    json rec;
    for (auto [name, obs] : {std::pair{"position", Observable::position}, std::pair{"momentum", Observable::momentum}}) {
      try {
        const auto r = reconstruct_expectation(f, obs, 0, s.eps_node);
        rec[name] = {{"value", r.value}, {"imaginary_residual", r.imaginary_residual}, {"masked_mass", r.masked_mass}};
      } catch (const MassLoss& e) {
        warnings.push_back(std::string("weak values: ") + e.what());
      }
    }
    diag["weak_value_expectations"] = rec;
  }

  // Trajectories, ensembles and probes share one provider.
  const bool need_provider = s.trajectories.layout != Layout::none || s.ensemble.n > 0 || s.probe.enabled;
  if (need_provider) {
    const auto provider = make_provider(s, snaps);
    const RealArray<double> rho0 = snaps.front().values().abs2();
    if (s.trajectories.layout != Layout::none) {
      res.initial_positions = initial_positions(s, rho0);
      const TrajectoryPlan tp{s.propagation.xi_start, s.propagation.xi_end, s.trajectories.d_xi,
                              s.trajectories.sample_stride};
      auto rep = run_trajectories(*provider, res.initial_positions, tp);
      res.trajectories = std::move(rep.trajectories);
      json td = {{"statuses", status_counts(res.trajectories)}, {"count", res.trajectories.size()}};
      if (dim == 1) {
        td["crossing_violations"] = count_crossings(res.trajectories);
        std::size_t sign_changes = 0;
        for (const auto& t : res.trajectories) {
          if (t.samples.empty()) continue;
          const double x0 = t.samples.front().position[0];
          for (const auto& smp : t.samples) {
            if (x0 != 0 && smp.position[0] * x0 < 0) {
              ++sign_changes;
              break;
            }
          }
        }
        td["sign_changes"] = sign_changes;
      }
      if (s.state.kind == StateKind::airy && s.state.airy.gamma == 0) {
        double worst = 0;
        for (const auto& t : res.trajectories) {
          const auto& f0 = t.samples.front();
          for (const auto& smp : t.samples) {
            const double expect = f0.position[0] + 0.25 * (smp.xi * smp.xi - f0.xi * f0.xi);
            worst = std::max(worst, std::abs(smp.position[0] - expect));
          }
        }
        td["parabola_max_error"] = worst;
      }
      diag["trajectories"] = td;
      if (s.outputs.trajectories) {
        const std::string tnote = "provider=" + provider->mode() + " d_xi=" + format_real(tp.step()) +
                                  (note.empty() ? "" : " " + note);
        w.put("trajectories.csv", trajectory_table(res.trajectories, dim, tnote));
        std::string st = "index,status,samples,reason\n";
        for (std::size_t i = 0; i < res.trajectories.size(); ++i) {
          const auto& t = res.trajectories[i];
          st += std::to_string(i) + ',' + to_string(t.status) + ',' + std::to_string(t.samples.size()) + ',' +
                t.stop_reason + '\n';
        }
        w.put("trajectory_status.csv", st);
      }
    }
    if (s.ensemble.n > 0) {
      TrajectoryPlan ep{s.propagation.xi_start, s.propagation.xi_end, s.ensemble.d_xi, 1};
      ep.sample_stride = std::max<Index>(1, ep.steps());
      EnsembleOptions opt;
      opt.histogram_bins = s.ensemble.bins;
      const auto rep = run_ensemble(*provider, g, rho0, s.ensemble.n, *s.seed, ep, opt);
      std::vector<double> ends;
      for (const auto& t : rep.trajectories) {
        if (t.status == TrajectoryStatus::complete) ends.push_back(t.samples.back().position[0]);
      }
      const RealArray<double> rho_end = snaps.back().values().abs2();
      const Grid g1 = dim == 1 ? g : Grid({g.axis(0)});
      const RealArray<double> ref = dim == 1 ? rho_end : x_marginal(g, rho_end);
      json ed = {{"n", s.ensemble.n},
                 {"seed", rep.seed},
                 {"sampler", rep.sampler},
                 {"statuses", {{"complete", rep.statuses.complete},
                               {"masked_stop", rep.statuses.masked_stop},
                               {"out_of_domain", rep.statuses.out_of_domain}}},
                 {"ks_statistic", ends.empty() ? 1.0 : ks_statistic(ends, g1, ref)}};
      if (dim == 1) ed["crossing_violations"] = rep.crossing_violations;
      diag["ensemble"] = ed;
      const DensityCdf cdf(g1, ref);
      std::string out = "# \xCE\xBE=" + format_real(s.propagation.xi_end) + " axes=" + axes_descriptor(g) +
                        (note.empty() ? "" : " " + note) + "\n";
      const Index bins = s.ensemble.bins;
      if (dim == 1) {
        out += "x_lo,x_hi,histogram,reference\n";
        const auto& ax = g.axis(0);
        for (Index b = 0; b < bins; ++b) {
          const double lo = ax.x_min + ax.length() * static_cast<double>(b) / static_cast<double>(bins);
          const double hi = ax.x_min + ax.length() * static_cast<double>(b + 1) / static_cast<double>(bins);
          out += format_real(lo) + ',' + format_real(hi) + ',' +
                 format_real(rep.transport_histogram[static_cast<std::size_t>(b)]) + ',' +
                 format_real((cdf(hi) - cdf(lo)) / (hi - lo)) + '\n';
        }
      } else {
        out += "ix,iy,histogram\n";
        for (Index b = 0; b < bins * bins; ++b) {
          out += std::to_string(b / bins) + ',' + std::to_string(b % bins) + ',' +
                 format_real(rep.transport_histogram[static_cast<std::size_t>(b)]) + '\n';
        }
      }
      w.put("ensemble.csv", out);
    }
    if (s.probe.enabled) {
      const TrajectoryPlan pp{s.propagation.xi_start, s.propagation.xi_end, s.probe.d_xi, 1};
      res.probe = entanglement_probe(*provider, s.probe.x0, s.probe.y0_variants, pp);
      json pd = {{"x0", s.probe.x0},
                 {"y0_variants", s.probe.y0_variants},
                 {"deviation", res.probe.deviation},
                 {"max_deviation", res.probe.max_deviation},
                 {"statuses", status_counts(res.probe.variants)}};
      if (s.probe.threshold) {
        const bool entangled = s.state.kind == StateKind::bell;
        pd["threshold"] = *s.probe.threshold;
        pd["criterion"] = entangled ? "max_deviation > threshold" : "max_deviation <= threshold";
        pd["satisfied"] = entangled ? res.probe.max_deviation > *s.probe.threshold
                                    : res.probe.max_deviation <= *s.probe.threshold;
      }
      diag["probe"] = pd;
      w.put("probe.csv", trajectory_table(res.probe.variants, 2, "probe x0=" + format_real(s.probe.x0)));
    }
  }

  if (s.outputs.plot_script) w.put("plot.py", plot_script(s));
  diag["warnings"] = warnings;

  RunManifest& m = res.manifest;
  m.scenario = to_json(s);
  m.scenario_sha256 = sha256_hex(m.scenario.dump());
  m.files = w.files();
  m.diagnostics = diag;
  const std::string text = m.to_json().dump(2) + "\n";
  write_file(out_dir / "manifest.json", text);
  m.digest = sha256_hex(text);
  return res;
}

}  // namespace bohmflow
