#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bohmflow/export.hpp"
#include "bohmflow/runner.hpp"

using namespace bohmflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string stored_digest(const std::string& name) {
  std::istringstream in(slurp(fs::path(BOHMFLOW_SOURCE_DIR) / "tests" / "golden" / (name + ".sha256")));
  std::string d;
  in >> d;
  return d;
}

/// Largest |rho v - j| over unmasked points of every exported velocity grid,
/// with rho and j recomputed from the snapshot the grid was written from.
double worst_velocity_identity(const fs::path& dir, const RunResult& r, int dim, std::size_t& grids) {
  static const char* axes[] = {"x", "y"};
  double worst = 0;
  for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
    for (int a = 0; a < dim; ++a) {
      char name[64];
      std::snprintf(name, sizeof name, "velocity_%s_%04zu.csv", axes[a], i);
      if (!fs::exists(dir / name)) continue;
      ++grids;
      const auto& f = r.snapshots[i];
      const RealArray<double> rho = density(f);
      const auto j = current(f);
      std::istringstream in(slurp(dir / name));
      std::string line;
      std::getline(in, line);
      for (Index q = 0; std::getline(in, line); ++q) {
        if (line == "nan") continue;
        worst = std::max(worst, std::abs(rho[q] * std::stod(line) - j(q, a)));
      }
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("builtin manifests match the stored digests") {
  for (const auto& name : list_builtins()) {
    CAPTURE(name);
    const Scenario s = load_scenario("builtin:" + name);
    const fs::path dir = fs::temp_directory_path() / ("bohmflow_golden_" + name);
    fs::remove_all(dir);
    const auto r = run_scenario(s, dir);
    CHECK(r.manifest.digest == stored_digest(name));
    CHECK(sha256_hex(slurp(dir / "manifest.json")) == r.manifest.digest);
    std::size_t grids = 0;
    const double worst = worst_velocity_identity(dir, r, s.grid.dimension(), grids);
    if (grids > 0) CHECK(worst < 1e-10);
    fs::remove_all(dir);
  }
}
