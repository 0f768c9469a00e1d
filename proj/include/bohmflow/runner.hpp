#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bohmflow/scenario.hpp"

namespace bohmflow {

struct FileRecord {
  std::string name;
  std::string sha256;
  std::size_t bytes = 0;
};

struct RunManifest {
  nlohmann::json scenario;     // resolved scenario echo
  std::string scenario_sha256; // digest of the canonical echo
  std::string version = kToolVersion;
  std::vector<FileRecord> files;
  nlohmann::json diagnostics;
  std::string digest;  // SHA-256 of the manifest.json bytes

  nlohmann::json to_json() const;
};

struct RunResult {
  RunManifest manifest;
  std::vector<WaveField> snapshots;
  std::vector<Trajectory> trajectories;
  std::vector<Point> initial_positions;
  ProbeResult probe;
};

/// Runs a scenario and writes its artifacts plus manifest.json into
/// `out_dir` (created if missing).
RunResult run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir);

/// Initial positions of the configured trajectory layout.
std::vector<Point> initial_positions(const Scenario& s, const RealArray<double>& rho0);

}  // namespace bohmflow
