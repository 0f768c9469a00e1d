#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bohmflow/paraxial.hpp"

namespace bohmflow {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchema = "bohmflow/1";

enum class StateKind { gaussian, bell, factorizable, airy, counterprop };
enum class ProviderMode { grid, analytic };
enum class Layout { none, uniform, linspace, born, list };

struct Apodization {
  double margin = 12.0;
  double width = 1.0;
};

struct StateConfig {
  StateKind kind = StateKind::gaussian;
  std::vector<GaussianSpec> packets;
  bool normalize = true;
  BellSpec bell;
  AirySpec airy;    // single beam, or beam A of the pair
  AirySpec airy_b;  // beam B (mirrored)
  cd weight_a{1.0, 0.0};
  cd weight_b{1.0, 0.0};
  Apodization apodize;
};

struct PotentialConfig {
  bool harmonic = false;
  double omega = 0;
  std::vector<double> center;
};

struct PropagationConfig {
  double xi_start = 0;
  double xi_end = 0;
  double d_xi = 0;
  Index snapshot_stride = 1;
  PotentialConfig potential;
};

struct FrameConfig {
  OpticalMedium medium;
  std::optional<double> z_end_physical;
};

struct TrajectoryConfig {
  Layout layout = Layout::none;
  std::size_t n = 0;
  double d_xi = 0.01;
  std::vector<double> range;  // [a, b] for linspace
  std::vector<Point> positions;
  Index sample_stride = 1;
};

struct EnsembleConfig {
  std::size_t n = 0;
  Index bins = 64;
  double d_xi = 0.01;
};

struct ProbeConfig {
  bool enabled = false;
  double x0 = 0;
  std::vector<double> y0_variants;
  double d_xi = 0.01;
  std::optional<double> threshold;
};

struct OutputConfig {
  std::vector<std::string> fields;  // density, velocity, quantum_potential, current, osmotic, psi
  Index field_every = 1;            // export every k-th snapshot (and the last)
  std::vector<std::string> formats{"csv"};
  std::vector<double> cuts;
  bool weak_values = false;
  bool trajectories = true;
  bool plot_script = false;
};

/// Fully resolved scenario; every default is filled in.
struct Scenario {
  std::string name = "scenario";
  StateConfig state;
  Grid grid;
  PropagationConfig propagation;
  std::optional<FrameConfig> frame;
  ProviderMode provider = ProviderMode::grid;
  TrajectoryConfig trajectories;
  EnsembleConfig ensemble;
  ProbeConfig probe;
  std::optional<std::uint64_t> seed;
  double eps_node = kDefaultNodeThreshold;
  OutputConfig outputs;
};

/// Command-line overrides applied before validation.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<Index> snapshot_stride;
};

/// Parses and validates JSON text. `origin` names the source in messages.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<config>",
                        const Overrides& overrides = {});

/// Reads a file, or a builtin when `path` is "builtin:<name>".
Scenario load_scenario(const std::string& path, const Overrides& overrides = {});

/// Canonical JSON of the resolved scenario (sorted keys).
nlohmann::json to_json(const Scenario& s);

std::vector<std::string> list_builtins();
/// JSON source text of a builtin; ValidationError for unknown names.
std::string builtin_source(const std::string& name);

std::string to_string(StateKind k);

}  // namespace bohmflow
