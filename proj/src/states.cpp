#include "bohmflow/states.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bohmflow/airy.hpp"

namespace bohmflow {

namespace {

void check_2d(const Grid& g, const char* what) {
  if (g.dimension() != 2) throw GridMismatch(std::string(what) + " needs a 2D grid");
}

}  // namespace

void GaussianSpec::validate() const {
  if (center.size() < 1 || center.size() > 2 || sigma0.size() != center.size() ||
      k0.size() != center.size()) {
    throw ValidationError("gaussian: center, sigma0 and k0 need one entry per axis (1 or 2)");
  }
  if ((sigma0.array() <= 0).any() || !sigma0.allFinite()) {
    throw ValidationError("gaussian: sigma0 must be positive");
  }
  if (!center.allFinite() || !k0.allFinite()) throw ValidationError("gaussian: non-finite center or k0");
  if (!std::isfinite(weight.real()) || !std::isfinite(weight.imag())) {
    throw ValidationError("gaussian: weight must be finite");
  }
}

double gaussian_width(double sigma0, double xi) {
  const double tau = xi / (2 * sigma0 * sigma0);
  return sigma0 * std::sqrt(1 + tau * tau);
}

PointValue free_gaussian_1d(double center, double sigma0, double k0, double x, double xi) {
  const double s2 = sigma0 * sigma0;
  const cd spread(1.0, xi / (2 * s2));
  const double u = x - center - k0 * xi;
  const cd exponent = -u * u / (4 * s2 * spread) + cd(0, k0 * (x - center) - 0.5 * k0 * k0 * xi);
  const cd value = std::pow(2 * std::numbers::pi * s2, -0.25) / std::sqrt(spread) * std::exp(exponent);
  const cd dlog = -u / (2 * s2 * spread) + cd(0, k0);
  return {value, {value * dlog, 0.0}};
}

PointValue gaussian_value(const GaussianSpec& spec, std::span<const double> point, double xi) {
  const int d = spec.dimension();
  std::array<PointValue, 2> f{};
  for (int a = 0; a < d; ++a) {
    f[a] = free_gaussian_1d(spec.center[a], spec.sigma0[a], spec.k0[a], point[a], xi);
  }
  if (d == 1) {
    return {spec.weight * f[0].value, {spec.weight * f[0].gradient[0], 0.0}};
  }
  return {spec.weight * f[0].value * f[1].value,
          {spec.weight * f[0].gradient[0] * f[1].value, spec.weight * f[0].value * f[1].gradient[0]}};
}

WaveField gaussian_field(const GaussianSpec& spec, const Grid& grid, double xi) {
  spec.validate();
  if (spec.dimension() != grid.dimension()) {
    throw GridMismatch("gaussian_field: spec dimension does not match grid");
  }
  for (int a = 0; a < grid.dimension(); ++a) {
    const auto& ax = grid.axis(a);
    const double width = gaussian_width(spec.sigma0[a], xi);
    if (ax.dx() > width / 4) {
      std::ostringstream msg;
      msg << "gaussian_field: axis " << a << " spacing " << ax.dx() << " exceeds sigma(xi)/4 = "
          << width / 4;
      throw ResolutionError(msg.str());
    }
    if (std::abs(spec.k0[a]) > 0.5 * ax.nyquist()) {
      std::ostringstream msg;
      msg << "gaussian_field: carrier " << spec.k0[a] << " exceeds half the Nyquist wavenumber "
          << 0.5 * ax.nyquist();
      throw ResolutionError(msg.str());
    }
  }
  ComplexArray<double> values(grid.size());
  std::array<double, 2> point{};
  for (Index p = 0; p < grid.size(); ++p) {
    for (int a = 0; a < grid.dimension(); ++a) point[a] = grid.axis(a).coordinate(grid.axis_index(p, a));
    values[p] = gaussian_value(spec, std::span<const double>(point.data(), 2), xi).value;
  }
  return {grid, xi, std::move(values)};
}

WaveField superpose(std::span<const WaveField> fields, std::span<const cd> weights, bool renormalize) {
  if (fields.empty()) throw Error("superpose: no fields");
  if (fields.size() != weights.size()) throw Error("superpose: one weight per field required");
  const auto& first = fields.front();
  ComplexArray<double> sum = ComplexArray<double>::Zero(first.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    require_same_grid(first.grid(), fields[i].grid(), "superpose");
    if (fields[i].xi() != first.xi()) throw GridMismatch("superpose: fields at different xi");
    sum += weights[i] * fields[i].values();
  }
  WaveField out(first.grid(), first.xi(), std::move(sum));
  return renormalize ? normalized(out) : out;
}

PointValue superposition_value(std::span<const GaussianSpec> packets, std::span<const double> point,
                               double xi) {
  PointValue total{};
  for (const auto& spec : packets) {
    const auto v = gaussian_value(spec, point, xi);
    total.value += v.value;
    total.gradient[0] += v.gradient[0];
    total.gradient[1] += v.gradient[1];
  }
  return total;
}

WaveField superposition_field(std::span<const GaussianSpec> packets, const Grid& grid, double xi,
                              bool renormalize) {
  std::vector<WaveField> parts;
  std::vector<cd> ones;
  for (const auto& spec : packets) {
    parts.push_back(gaussian_field(spec, grid, xi));
    ones.emplace_back(1.0);
  }
  if (!renormalize) return superpose(parts, ones, false);
  // Normalize with the xi = 0 norm so the constant survives free evolution.
  std::vector<WaveField> initial;
  for (const auto& spec : packets) initial.push_back(gaussian_field(spec, grid, 0.0));
  const double n0 = norm_sq(superpose(initial, ones, false));
  const auto sum = superpose(parts, ones, false);
  return sum.with_values(sum.values() / std::sqrt(n0));
}

void BellSpec::validate() const {
  if (!(sigma0 > 0)) throw ValidationError("bell: sigma0 must be positive");
  if (site_a == site_b) throw ValidationError("bell: site_a and site_b must differ");
  if (parity != 1) throw ValidationError("bell: only the symmetric combination (parity +1) is supported");
}

PointValue bell_value(const BellSpec& spec, double x, double y, double xi) {
  const auto ax = free_gaussian_1d(spec.site_a, spec.sigma0, 0.0, x, xi);
  const auto bx = free_gaussian_1d(spec.site_b, spec.sigma0, 0.0, x, xi);
  const auto ay = free_gaussian_1d(spec.site_a, spec.sigma0, 0.0, y, xi);
  const auto by = free_gaussian_1d(spec.site_b, spec.sigma0, 0.0, y, xi);
  const double c = 1 / std::sqrt(2.0);
  const double p = spec.parity;
  return {c * (ax.value * by.value + p * bx.value * ay.value),
          {c * (ax.gradient[0] * by.value + p * bx.gradient[0] * ay.value),
           c * (ax.value * by.gradient[0] + p * bx.value * ay.gradient[0])}};
}

PointValue factorizable_value(const BellSpec& spec, double x, double y, double xi) {
  const auto ax = free_gaussian_1d(spec.site_a, spec.sigma0, 0.0, x, xi);
  const auto bx = free_gaussian_1d(spec.site_b, spec.sigma0, 0.0, x, xi);
  const auto ay = free_gaussian_1d(spec.site_a, spec.sigma0, 0.0, y, xi);
  const auto by = free_gaussian_1d(spec.site_b, spec.sigma0, 0.0, y, xi);
  const cd fx = ax.value + bx.value;
  const cd fy = ay.value + by.value;
  return {0.5 * fx * fy, {0.5 * (ax.gradient[0] + bx.gradient[0]) * fy, 0.5 * fx * (ay.gradient[0] + by.gradient[0])}};
}

namespace {

template <class F>
WaveField sample_2d(const BellSpec& spec, const Grid& grid, double xi, F&& f) {
  spec.validate();
  check_2d(grid, "bell/factorizable field");
  const double width = gaussian_width(spec.sigma0, xi);
  for (int a = 0; a < 2; ++a) {
    const auto& ax = grid.axis(a);
    if (ax.dx() > width / 4) {
      throw ResolutionError("bell field: grid spacing exceeds sigma(xi)/4 on axis " + std::to_string(a));
    }
    for (double site : {spec.site_a, spec.site_b}) {
      if (site - 6 * width < ax.x_min || site + 6 * width > ax.x_max) {
        throw ResolutionError("bell field: site " + std::to_string(site) +
                              " closer than 6 sigma(xi) to the box edge on axis " + std::to_string(a));
      }
    }
  }
  ComplexArray<double> values(grid.size());
  const Index ny = grid.axis(1).n;
  for (Index i = 0; i < grid.axis(0).n; ++i) {
    const double x = grid.axis(0).coordinate(i);
    for (Index j = 0; j < ny; ++j) values[i * ny + j] = f(x, grid.axis(1).coordinate(j));
  }
  return {grid, xi, std::move(values)};
}

}  // namespace

WaveField bell_field(const BellSpec& spec, const Grid& grid, double xi) {
  return sample_2d(spec, grid, xi, [&](double x, double y) { return bell_value(spec, x, y, xi).value; });
}

WaveField factorizable_field(const BellSpec& spec, const Grid& grid, double xi) {
  return sample_2d(spec, grid, xi,
                   [&](double x, double y) { return factorizable_value(spec, x, y, xi).value; });
}

void AirySpec::validate() const {
  if (!(gamma >= 0) || !std::isfinite(gamma)) throw ValidationError("airy: gamma must be >= 0");
  if (!(scale > 0)) throw ValidationError("airy: scale must be positive");
  if (!std::isfinite(shift)) throw ValidationError("airy: shift must be finite");
}

PointValue airy_value(const AirySpec& spec, double x, double z) {
  const double s = x - spec.shift;
  const double g = spec.gamma;
  const cd y(s - 0.25 * z * z, g * z);
  const cd exponent(g * s - 0.5 * g * z * z, 0.5 * s * z - z * z * z / 12.0 + 0.5 * g * g * z);
  const auto ai = airy_with_derivative(y);
  const cd e = std::exp(exponent);
  return {e * ai.ai, {e * (cd(g, 0.5 * z) * ai.ai + ai.dai), 0.0}};
}

WaveField airy_field(const AirySpec& spec, const Grid& grid, double z) {
  spec.validate();
  if (grid.dimension() != 1) throw GridMismatch("airy_field needs a 1D grid");
  ComplexArray<double> values(grid.size());
  for (Index j = 0; j < grid.size(); ++j) values[j] = airy_value(spec, grid.axis(0).coordinate(j), z).value;
  return {grid, z, std::move(values)};
}

}  // namespace bohmflow
