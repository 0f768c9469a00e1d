#include <CLI11.hpp>

#include <iostream>

#include "bohmflow/runner.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bohmflow: quantum-hydrodynamics scenarios (Bohmian flows, weak values, Airy beams)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bohmflow::kToolVersion));

  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<long long> stride;

  auto* run = app.add_subcommand("run", "run a scenario file or builtin:<name>");
  run->add_option("config", config, "scenario JSON path or builtin:<name>")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--snapshot-stride", stride, "override propagation.snapshot_stride");

  auto* builtins = app.add_subcommand("builtins", "list builtin scenarios");

  std::string vconfig;
  auto* validate = app.add_subcommand("validate", "parse and validate a scenario, print the resolved form");
  validate->add_option("config", vconfig, "scenario JSON path or builtin:<name>")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (builtins->parsed()) {
      for (const auto& name : bohmflow::list_builtins()) std::cout << name << '\n';
      return 0;
    }
    if (validate->parsed()) {
      const auto s = bohmflow::load_scenario(vconfig);
      std::cout << bohmflow::to_json(s).dump(2) << '\n';
      return 0;
    }
    bohmflow::Overrides ov;
    ov.seed = seed;
    if (stride) ov.snapshot_stride = static_cast<bohmflow::Index>(*stride);
    const auto s = bohmflow::load_scenario(config, ov);
    const auto r = bohmflow::run_scenario(s, out_dir);
    const auto& m = r.manifest;
    for (const auto& w : m.diagnostics["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
    std::cout << "scenario " << s.name << " sha256 " << m.scenario_sha256 << '\n';
    std::cout << "files " << m.files.size() << " manifest " << m.digest << '\n';
    return 0;
  } catch (const bohmflow::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const bohmflow::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
