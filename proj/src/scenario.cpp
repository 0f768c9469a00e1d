#include "bohmflow/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bohmflow/airy.hpp"
#include "bohmflow/propagator.hpp"

namespace bohmflow {

using nlohmann::json;

namespace {

const char* kind_names[] = {"gaussian", "bell", "factorizable", "airy", "counterprop"};

/// Object view that records which keys were read, so leftovers can be
/// reported as unknown.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string where = key.empty() ? (path_.empty() ? "<root>" : path_) : at(key);
    throw ValidationError(where + ": " + what);
  }

  const json* get(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, double fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) fail(key, "expected a number");
    return v->get<double>();
  }
  std::optional<double> opt_number(const std::string& key) {
    if (!has(key)) {
      used_.insert(key);
      return std::nullopt;
    }
    return number(key, 0);
  }
  long long integer(const std::string& key, long long fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) fail(key, "expected an integer");
    return v->get<long long>();
  }
  bool boolean(const std::string& key, bool fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(key, "expected true or false");
    return v->get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(key, "expected a string");
    return v->get<std::string>();
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (v->is_number()) return {v->get<double>()};
    if (!v->is_array()) fail(key, "expected a number or an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) fail(key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_array()) fail(key, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : *v) {
      if (!e.is_string()) fail(key, "expected an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ValidationError(at(it.key()) + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

cd parse_weight(Obj& o, const std::string& key) {
  const auto w = o.numbers(key, {1.0});
  if (w.size() == 1) return {w[0], 0.0};
  if (w.size() == 2) return {w[0], w[1]};
  o.fail(key, "weight is a number or [re, im]");
}

Eigen::VectorXd broadcast(Obj& o, const std::string& key, std::vector<double> v, int dim) {
  if (v.size() == 1 && dim == 2) v.push_back(v[0]);
  if (static_cast<int>(v.size()) != dim) o.fail(key, "needs " + std::to_string(dim) + " entries");
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
}

GaussianSpec parse_packet(const json& j, const std::string& path) {
  Obj o(j, path);
  const auto center = o.numbers("center", {0.0});
  const int dim = static_cast<int>(center.size());
  if (dim < 1 || dim > 2) o.fail("center", "needs 1 or 2 entries");
  GaussianSpec g;
  g.center = broadcast(o, "center", center, dim);
  g.sigma0 = broadcast(o, "sigma0", o.numbers("sigma0", {0.5}), dim);
  g.k0 = broadcast(o, "k0", o.numbers("k0", {0.0}), dim);
  g.weight = parse_weight(o, "weight");
  o.finish();
  try {
    g.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return g;
}

AirySpec parse_beam(Obj& o) {
  AirySpec a;
  a.gamma = o.number("gamma", 0.0);
  a.shift = o.number("shift", 0.0);
  a.scale = o.number("scale", 1e-4);
  try {
    a.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(o.path() + ": " + e.what());
  }
  return a;
}

StateConfig parse_state(const json* j) {
  StateConfig s;
  if (!j) throw ValidationError("state: missing");
  json holder;
  if (j->is_string()) {
    holder = json{{"kind", *j}};
    j = &holder;
  }
  Obj o(*j, "state");
  const std::string kind = o.string("kind", "");
  if (kind == "gaussian") {
    s.kind = StateKind::gaussian;
    const json* packets = o.get("packets");
    if (!packets) {
      s.packets.push_back(parse_packet(json::object(), "state.packets[0]"));
    } else {
      if (!packets->is_array() || packets->empty()) o.fail("packets", "expected a non-empty array");
      for (std::size_t i = 0; i < packets->size(); ++i) {
        s.packets.push_back(parse_packet((*packets)[i], "state.packets[" + std::to_string(i) + "]"));
      }
      for (const auto& p : s.packets) {
        if (p.dimension() != s.packets[0].dimension()) o.fail("packets", "all packets need the same dimension");
      }
    }
    s.normalize = o.boolean("normalize", true);
  } else if (kind == "bell" || kind == "factorizable") {
    s.kind = kind == "bell" ? StateKind::bell : StateKind::factorizable;
    s.bell.site_a = o.number("site_a", s.bell.site_a);
    s.bell.site_b = o.number("site_b", s.bell.site_b);
    s.bell.sigma0 = o.number("sigma0", s.bell.sigma0);
    s.bell.parity = static_cast<int>(o.integer("parity", s.bell.parity));
    try {
      s.bell.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("state: ") + e.what());
    }
  } else if (kind == "airy") {
    s.kind = StateKind::airy;
    s.airy = parse_beam(o);
  } else if (kind == "counterprop") {
    s.kind = StateKind::counterprop;
    for (const char* key : {"beam_a", "beam_b"}) {
      const json* b = o.get(key);
      const json empty = json::object();
      Obj bo(b ? *b : empty, o.at(key));
      (std::string(key) == "beam_a" ? s.airy : s.airy_b) = parse_beam(bo);
      bo.finish();
    }
    const json* w = o.get("weights");
    if (w) {
      if (!w->is_array() || w->size() != 2) o.fail("weights", "expected [w_a, w_b]");
      json wrap = {{"a", (*w)[0]}, {"b", (*w)[1]}};
      Obj wo(wrap, o.at("weights"));
      s.weight_a = parse_weight(wo, "a");
      s.weight_b = parse_weight(wo, "b");
    }
  } else {
    o.fail("kind", "unknown state kind '" + kind + "' (gaussian, bell, factorizable, airy, counterprop)");
  }
  if (s.kind == StateKind::airy || s.kind == StateKind::counterprop) {
    if (const json* a = o.get("apodize")) {
      Obj ao(*a, "state.apodize");
      s.apodize.margin = ao.number("margin", s.apodize.margin);
      s.apodize.width = ao.number("width", s.apodize.width);
      ao.finish();
      if (!(s.apodize.margin >= 0) || !(s.apodize.width > 0)) {
        throw ValidationError("state.apodize: margin must be >= 0 and width > 0");
      }
    }
  }
  o.finish();
  return s;
}

int state_dimension(const StateConfig& s) {
  switch (s.kind) {
    case StateKind::gaussian: return s.packets.front().dimension();
    case StateKind::bell:
    case StateKind::factorizable: return 2;
    default: return 1;
  }
}

Grid default_grid(const StateConfig& s) {
  switch (s.kind) {
    case StateKind::gaussian:
      return state_dimension(s) == 1 ? make_grid({{-32.0, 32.0, 1024}}) : make_grid({{-16.0, 16.0, 256}, {-16.0, 16.0, 256}});
    case StateKind::bell:
    case StateKind::factorizable: return make_grid({{-40.0, 40.0, 640}, {-40.0, 40.0, 640}});
    case StateKind::airy: return make_grid({{-26.0, 24.0, 2048}});
    case StateKind::counterprop: return make_grid({{-20.0, 20.0, 2048}});
  }
  throw ValidationError("grid: no default");
}

Grid parse_grid(const json* j, const StateConfig& s) {
  if (!j || (j->is_string() && j->get<std::string>() == "default")) return default_grid(s);
  Obj o(*j, "grid");
  const json* axes = o.get("axes");
  if (!axes || !axes->is_array()) o.fail("axes", "expected an array of {min, max, n}");
  std::vector<Axis<double>> out;
  for (std::size_t i = 0; i < axes->size(); ++i) {
    Obj a((*axes)[i], "grid.axes[" + std::to_string(i) + "]");
    if (!a.has("min") || !a.has("max") || !a.has("n")) a.fail("", "needs min, max and n");
    out.push_back({a.number("min", 0), a.number("max", 0), static_cast<Index>(a.integer("n", 0))});
    a.finish();
  }
  o.finish();
  try {
    return Grid(out);
  } catch (const InvalidGrid& e) {
    throw ValidationError(std::string("grid: ") + e.what());
  }
}

Layout parse_layout(Obj& o) {
  const std::string l = o.string("layout", "none");
  static const std::map<std::string, Layout> names{{"none", Layout::none},         {"uniform", Layout::uniform},
                                                   {"linspace", Layout::linspace}, {"born", Layout::born},
                                                   {"list", Layout::list}};
  auto it = names.find(l);
  if (it == names.end()) o.fail("layout", "unknown layout '" + l + "' (none, uniform, linspace, born, list)");
  return it->second;
}

const char* layout_name(Layout l) {
  switch (l) {
    case Layout::none: return "none";
    case Layout::uniform: return "uniform";
    case Layout::linspace: return "linspace";
    case Layout::born: return "born";
    case Layout::list: return "list";
  }
  return "none";
}

void check_positive(double v, const std::string& where) {
  if (!(v > 0) || !std::isfinite(v)) throw ValidationError(where + ": must be positive");
}

/// Largest |Ai argument| the airy closed form will need on this scenario.
double airy_argument_bound(const AirySpec& a, const Axis<double>& ax, double z0, double z1, bool mirrored) {
  double worst = 0;
  for (double x : {ax.x_min, ax.x_max}) {
    for (double z : {z0, z1}) {
      const double xs = mirrored ? -x : x;
      worst = std::max(worst, std::abs(cd(xs - a.shift - 0.25 * z * z, a.gamma * z)));
    }
  }
  return worst;
}

Scenario resolve(const json& root, const Overrides& ov) {
  Obj o(root, "");
  Scenario s;
  const std::string schema = o.string("schema", kSchema);
  if (schema != kSchema) o.fail("schema", "unsupported schema '" + schema + "' (expected " + kSchema + ")");
  s.name = o.string("name", "scenario");
  s.state = parse_state(o.get("state"));
  const int dim = state_dimension(s.state);
  s.grid = parse_grid(o.get("grid"), s.state);
  if (s.grid.dimension() != dim) {
    throw ValidationError("grid: state needs a " + std::to_string(dim) + "D grid");
  }
  const bool airy_like = s.state.kind == StateKind::airy || s.state.kind == StateKind::counterprop;

  // frame
  if (const json* f = o.get("frame")) {
    Obj fo(*f, "frame");
    FrameConfig fc;
    fc.medium.wavelength_vacuum = fo.number("wavelength", fc.medium.wavelength_vacuum);
    fc.medium.refractive_index = fo.number("refractive_index", fc.medium.refractive_index);
    fc.medium.transverse_scale = fo.number("transverse_scale", fc.medium.transverse_scale);
    fc.z_end_physical = fo.opt_number("z_end_physical");
    fo.finish();
    try {
      fc.medium.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("frame: ") + e.what());
    }
    if (fc.z_end_physical) check_positive(*fc.z_end_physical, "frame.z_end_physical");
    s.frame = fc;
  }

  // propagation
  {
    const json empty = json::object();
    const json* p = o.get("propagation");
    Obj po(p ? *p : empty, "propagation");
    auto& pr = s.propagation;
    pr.xi_start = po.number("xi_start", 0.0);
    const double default_end = s.state.kind == StateKind::gaussian ? 3.0
                               : s.state.kind == StateKind::counterprop ? 3.0
                                                                        : 4.0;
    const auto xi_end = po.opt_number("xi_end");
    if (s.frame && s.frame->z_end_physical) {
      if (xi_end) throw ValidationError("propagation.xi_end: conflicts with frame.z_end_physical");
      pr.xi_end = ParaxialFrame(s.frame->medium).to_reduced(0, *s.frame->z_end_physical).z;
    } else {
      pr.xi_end = xi_end.value_or(default_end);
    }
    pr.d_xi = po.number("d_xi", airy_like ? 1.0 / 64 : default_step(s.grid));
    check_positive(pr.d_xi, "propagation.d_xi");
    if (!(pr.xi_end >= pr.xi_start)) throw ValidationError("propagation.xi_end: precedes xi_start");
    Index stride = 1;
    if (dim == 1 && s.state.kind == StateKind::gaussian) {
      stride = std::max<Index>(1, static_cast<Index>(std::llround((1.0 / 128) / pr.d_xi)));
    }
    pr.snapshot_stride = static_cast<Index>(po.integer("snapshot_stride", stride));
    if (ov.snapshot_stride) pr.snapshot_stride = *ov.snapshot_stride;
    if (pr.snapshot_stride < 1) throw ValidationError("propagation.snapshot_stride: must be >= 1");
    if (const json* pot = po.get("potential")) {
      if (pot->is_string()) {
        if (pot->get<std::string>() != "none") po.fail("potential", "expected \"none\" or {kind: harmonic, ...}");
      } else {
        Obj vo(*pot, "propagation.potential");
        const std::string kind = vo.string("kind", "");
        if (kind != "harmonic") vo.fail("kind", "unknown potential '" + kind + "' (harmonic)");
        pr.potential.harmonic = true;
        pr.potential.omega = vo.number("omega", 1.0);
        pr.potential.center = vo.numbers("center", std::vector<double>(static_cast<std::size_t>(dim), 0.0));
        if (static_cast<int>(pr.potential.center.size()) != dim) vo.fail("center", "needs one entry per axis");
        check_positive(pr.potential.omega, "propagation.potential.omega");
        vo.finish();
      }
    }
    po.finish();
    if (airy_like && pr.potential.harmonic) {
      throw ValidationError("propagation.potential: airy states are sampled from their free closed form");
    }
  }

  if (airy_like) {
    const auto& ax = s.grid.axis(0);
    double bound = airy_argument_bound(s.state.airy, ax, s.propagation.xi_start, s.propagation.xi_end, false);
    if (s.state.kind == StateKind::counterprop) {
      bound = std::max(bound, airy_argument_bound(s.state.airy_b, ax, s.propagation.xi_start,
                                                  s.propagation.xi_end, true));
    }
    if (bound > kAiryDomainRadius) {
      throw ValidationError("grid: Airy argument reaches |y| = " + std::to_string(bound) +
                            ", beyond the supported radius " + std::to_string(kAiryDomainRadius));
    }
  }

  // provider
  {
    const std::string p = o.string("provider", (s.state.kind == StateKind::gaussian || s.state.kind == StateKind::airy)
                                                   ? "grid"
                                                   : "analytic");
    if (p == "grid") {
      s.provider = ProviderMode::grid;
    } else if (p == "analytic") {
      s.provider = ProviderMode::analytic;
      if (s.propagation.potential.harmonic) {
        throw ValidationError("provider: analytic mode needs potential none (no closed form otherwise)");
      }
    } else {
      o.fail("provider", "expected grid or analytic");
    }
    if (s.provider == ProviderMode::grid) {
      const auto& pr = s.propagation;
      const auto rp = resolve_plan(PropagationPlan{pr.d_xi, pr.xi_end, pr.snapshot_stride}, pr.xi_start, s.grid);
      if (rp.steps < 1 || rp.steps % rp.snapshot_stride != 0) {
        throw ValidationError("propagation.snapshot_stride: the grid provider needs uniformly spaced snapshots, "
                              "so the stride must divide the step count (" + std::to_string(rp.steps) + ")");
      }
    }
  }

  if (const json* t = o.get("trajectories")) {
    Obj to(*t, "trajectories");
    auto& tc = s.trajectories;
    tc.layout = parse_layout(to);
    tc.n = static_cast<std::size_t>(to.integer("n", 0));
    tc.d_xi = to.number("d_xi", tc.d_xi);
    check_positive(tc.d_xi, "trajectories.d_xi");
    tc.range = to.numbers("range", {});
    tc.sample_stride = static_cast<Index>(to.integer("sample_stride", 1));
    if (tc.sample_stride < 1) to.fail("sample_stride", "must be >= 1");
    if (const json* ps = to.get("positions")) {
      if (!ps->is_array()) to.fail("positions", "expected an array");
      for (const auto& e : *ps) {
        std::vector<double> v;
        if (e.is_number()) v = {e.get<double>()};
        else if (e.is_array()) for (const auto& c : e) v.push_back(c.is_number() ? c.get<double>() : NAN);
        if (static_cast<int>(v.size()) != dim || !std::isfinite(v[0]) || !std::isfinite(v.back())) {
          to.fail("positions", "each position needs " + std::to_string(dim) + " finite coordinates");
        }
        tc.positions.push_back({v[0], dim == 2 ? v[1] : 0.0});
      }
    }
    to.finish();
    switch (tc.layout) {
      case Layout::none: break;
      case Layout::list:
        if (tc.positions.empty()) throw ValidationError("trajectories.positions: list layout needs positions");
        tc.n = tc.positions.size();
        break;
      case Layout::linspace:
        if (tc.range.size() != 2 || !(tc.range[1] >= tc.range[0])) {
          throw ValidationError("trajectories.range: linspace needs [a, b] with a <= b");
        }
        [[fallthrough]];
      default:
        if (tc.n < 1) throw ValidationError("trajectories.n: must be >= 1");
    }
    if (tc.layout == Layout::uniform && s.state.kind != StateKind::gaussian) {
      throw ValidationError("trajectories.layout: uniform packet support needs a gaussian state (use linspace)");
    }
    if (tc.layout == Layout::linspace && dim != 1) {
      throw ValidationError("trajectories.layout: linspace is 1D only");
    }
  }

  if (const json* e = o.get("ensemble")) {
    Obj eo(*e, "ensemble");
    s.ensemble.n = static_cast<std::size_t>(eo.integer("n", 0));
    s.ensemble.bins = static_cast<Index>(eo.integer("bins", 64));
    s.ensemble.d_xi = eo.number("d_xi", s.ensemble.d_xi);
    eo.finish();
    check_positive(s.ensemble.d_xi, "ensemble.d_xi");
    if (s.ensemble.bins < 1) throw ValidationError("ensemble.bins: must be >= 1");
  }

  if (const json* p = o.get("probe")) {
    Obj po(*p, "probe");
    s.probe.enabled = true;
    if (!po.has("x0") || !po.has("y0_variants")) po.fail("", "needs x0 and y0_variants");
    s.probe.x0 = po.number("x0", 0);
    s.probe.y0_variants = po.numbers("y0_variants", {});
    s.probe.d_xi = po.number("d_xi", s.probe.d_xi);
    s.probe.threshold = po.opt_number("threshold");
    po.finish();
    if (dim != 2) throw ValidationError("probe: needs a 2D state");
    if (s.probe.y0_variants.empty()) throw ValidationError("probe.y0_variants: needs at least one entry");
    check_positive(s.probe.d_xi, "probe.d_xi");
  }

  if (const json* seed = o.get("seed")) {
    if (!seed->is_number_unsigned()) o.fail("seed", "expected a non-negative integer");
    s.seed = seed->get<std::uint64_t>();
  }
  if (ov.seed) s.seed = ov.seed;
  if (!s.seed && (s.trajectories.layout == Layout::born || s.ensemble.n > 0)) {
    throw ValidationError("seed: required when positions are Born-sampled");
  }

  s.eps_node = o.number("eps_node", kDefaultNodeThreshold);
  if (!(s.eps_node > 0) || s.eps_node > 1e-3) throw ValidationError("eps_node: must lie in (0, 1e-3]");

  if (const json* out = o.get("outputs")) {
    Obj oo(*out, "outputs");
    auto& oc = s.outputs;
    oc.fields = oo.strings("fields", {});
    static const std::set<std::string> known{"density", "velocity", "quantum_potential", "current", "osmotic", "psi"};
    for (const auto& f : oc.fields) {
      if (!known.count(f)) oo.fail("fields", "unknown field '" + f + "'");
    }
    oc.field_every = static_cast<Index>(oo.integer("field_every", 1));
    if (oc.field_every < 1) oo.fail("field_every", "must be >= 1");
    oc.formats = oo.strings("formats", {"csv"});
    for (const auto& f : oc.formats) {
      if (f != "csv" && f != "pgm16") oo.fail("formats", "unknown format '" + f + "' (csv, pgm16)");
    }
    oc.cuts = oo.numbers("cuts", {});
    oc.weak_values = oo.boolean("weak_values", false);
    oc.trajectories = oo.boolean("trajectories", true);
    oc.plot_script = oo.boolean("plot_script", false);
    oo.finish();
    if (dim != 1 && (!oc.cuts.empty() || oc.weak_values)) {
      throw ValidationError("outputs: cuts and weak_values are 1D outputs");
    }
    for (double c : oc.cuts) {
      if (c < s.propagation.xi_start || c > s.propagation.xi_end) {
        throw ValidationError("outputs.cuts: " + std::to_string(c) + " lies outside the propagation window");
      }
    }
  }
  o.finish();
  return s;
}

json axis_json(const Axis<double>& a) { return {{"min", a.x_min}, {"max", a.x_max}, {"n", a.n}}; }

json cd_json(cd w) { return json::array({w.real(), w.imag()}); }

json beam_json(const AirySpec& a) { return {{"gamma", a.gamma}, {"shift", a.shift}, {"scale", a.scale}}; }

std::vector<double> vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string to_string(StateKind k) { return kind_names[static_cast<int>(k)]; }

Scenario parse_scenario(const std::string& text, const std::string& origin, const Overrides& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos > 0 ? pos - 1 : 0), '\n');
    throw ParseError(origin + ":" + std::to_string(line) + ": " + e.what());
  }
  try {
    return resolve(root, overrides);
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ": " + e.what());
  }
}

Scenario load_scenario(const std::string& path, const Overrides& overrides) {
  const std::string prefix = "builtin:";
  if (path.rfind(prefix, 0) == 0) {
    const std::string name = path.substr(prefix.size());
    return parse_scenario(builtin_source(name), path, overrides);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path, overrides);
}

json to_json(const Scenario& s) {
  json j;
  j["schema"] = kSchema;
  j["name"] = s.name;
  json st;
  st["kind"] = to_string(s.state.kind);
  switch (s.state.kind) {
    case StateKind::gaussian: {
      st["normalize"] = s.state.normalize;
      json ps = json::array();
      for (const auto& p : s.state.packets) {
        ps.push_back({{"center", vec(p.center)}, {"sigma0", vec(p.sigma0)}, {"k0", vec(p.k0)}, {"weight", cd_json(p.weight)}});
      }
      st["packets"] = ps;
      break;
    }
    case StateKind::bell:
    case StateKind::factorizable:
      st["site_a"] = s.state.bell.site_a;
      st["site_b"] = s.state.bell.site_b;
      st["sigma0"] = s.state.bell.sigma0;
      st["parity"] = s.state.bell.parity;
      break;
    case StateKind::airy:
      st.update(beam_json(s.state.airy));
      st["apodize"] = {{"margin", s.state.apodize.margin}, {"width", s.state.apodize.width}};
      break;
    case StateKind::counterprop:
      st["beam_a"] = beam_json(s.state.airy);
      st["beam_b"] = beam_json(s.state.airy_b);
      st["weights"] = json::array({cd_json(s.state.weight_a), cd_json(s.state.weight_b)});
      st["apodize"] = {{"margin", s.state.apodize.margin}, {"width", s.state.apodize.width}};
      break;
  }
  j["state"] = st;
  json axes = json::array();
  for (const auto& a : s.grid.axes()) axes.push_back(axis_json(a));
  j["grid"] = {{"axes", axes}};
  const auto& p = s.propagation;
  json pot = "none";
  if (p.potential.harmonic) pot = {{"kind", "harmonic"}, {"omega", p.potential.omega}, {"center", p.potential.center}};
  j["propagation"] = {{"xi_start", p.xi_start}, {"xi_end", p.xi_end}, {"d_xi", p.d_xi},
                      {"snapshot_stride", p.snapshot_stride}, {"potential", pot}};
  if (s.frame) {
    json f = {{"wavelength", s.frame->medium.wavelength_vacuum},
              {"refractive_index", s.frame->medium.refractive_index},
              {"transverse_scale", s.frame->medium.transverse_scale}};
    if (s.frame->z_end_physical) {
      f["z_end_physical"] = *s.frame->z_end_physical;
      // xi_end is derived from the frame; echoing it too would conflict on reload.
      j["propagation"].erase("xi_end");
    }
    j["frame"] = f;
  }
  j["provider"] = s.provider == ProviderMode::grid ? "grid" : "analytic";
  const auto& t = s.trajectories;
  json positions = json::array();
  for (const auto& q : t.positions) {
    positions.push_back(s.grid.dimension() == 1 ? json(q[0]) : json::array({q[0], q[1]}));
  }
  j["trajectories"] = {{"layout", layout_name(t.layout)}, {"n", t.n},         {"d_xi", t.d_xi},
                       {"range", t.range},                {"positions", positions}, {"sample_stride", t.sample_stride}};
  j["ensemble"] = {{"n", s.ensemble.n}, {"bins", s.ensemble.bins}, {"d_xi", s.ensemble.d_xi}};
  if (s.probe.enabled) {
    json pr = {{"x0", s.probe.x0}, {"y0_variants", s.probe.y0_variants}, {"d_xi", s.probe.d_xi}};
    if (s.probe.threshold) pr["threshold"] = *s.probe.threshold;
    j["probe"] = pr;
  }
  if (s.seed) j["seed"] = *s.seed;
  j["eps_node"] = s.eps_node;
  const auto& o = s.outputs;
  j["outputs"] = {{"fields", o.fields},   {"field_every", o.field_every},   {"formats", o.formats},
                  {"cuts", o.cuts},       {"weak_values", o.weak_values},   {"trajectories", o.trajectories},
                  {"plot_script", o.plot_script}};
  return j;
}

}  // namespace bohmflow
