#include "bohmflow/spline.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace bohmflow {
namespace {

/// Solves M_{j-1} + 4 M_j + M_{j+1} = 6 (f_{j+1} - 2 f_j + f_{j-1}) / h^2 on
/// every periodic line of `f` along `axis`.
RealArray<double> second_derivatives(const Grid& g, const RealArray<double>& f, int axis) {
  const Index n = g.axis(axis).n;
  const double h = g.axis(axis).dx();
  const Index stride = g.stride(axis);
  const Index lines = g.size() / n;
  Eigen::FFT<double> fft;
  std::vector<double> line(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> spec;
  std::vector<double> back;
  std::vector<double> gain(static_cast<std::size_t>(n / 2 + 1));
  for (Index k = 0; k <= n / 2; ++k) {
    const double c = std::cos(2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    gain[static_cast<std::size_t>(k)] = 6.0 / (h * h) * (2 * c - 2) / (4 + 2 * c);
  }
  RealArray<double> out(f.size());
  for (Index l = 0; l < lines; ++l) {
    // Start of line l: lines run along `axis`, the other index is l.
    const Index base = (g.dimension() == 1) ? 0 : (axis == 0 ? l : l * n);
    for (Index j = 0; j < n; ++j) line[static_cast<std::size_t>(j)] = f[base + j * stride];
    fft.fwd(spec, line);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const std::size_t m = std::min(k, static_cast<std::size_t>(n) - k);
      spec[k] *= gain[m];
    }
    fft.inv(back, spec);
    for (Index j = 0; j < n; ++j) out[base + j * stride] = back[static_cast<std::size_t>(j)];
  }
  return out;
}

}  // namespace

PeriodicSpline::PeriodicSpline(const Grid& grid, const RealArray<double>& samples)
    : grid_(grid), f_(samples) {
  if (samples.size() != grid.size()) throw GridMismatch("spline: sample count does not match grid");
  fxx_ = second_derivatives(grid_, f_, 0);
  if (grid_.dimension() == 2) {
    fyy_ = second_derivatives(grid_, f_, 1);
    fxxyy_ = second_derivatives(grid_, fxx_, 1);
  }
}

PeriodicSpline::Location PeriodicSpline::locate(const Grid& grid, const std::array<double, 2>& point) {
  Location loc;
  for (int a = 0; a < grid.dimension(); ++a) {
    const auto& ax = grid.axis(a);
    const double h = ax.dx();
    const double u = (point[static_cast<std::size_t>(a)] - ax.x_min) / h;
    const double cell = std::floor(u);
    Index lo = static_cast<Index>(cell);
    const double t = u - cell;
    if (lo < 0 || lo >= ax.n) lo = ((lo % ax.n) + ax.n) % ax.n;
    const double s = 1 - t;
    loc.axis[static_cast<std::size_t>(a)] = {lo, lo + 1 == ax.n ? 0 : lo + 1, s, t, h * h / 6 * (s * s * s - s),
                                             h * h / 6 * (t * t * t - t)};
  }
  return loc;
}

double PeriodicSpline::operator()(const Location& loc) const {
  const auto& wx = loc.axis[0];
  if (grid_.dimension() == 1) {
    return wx.a * f_[wx.lo] + wx.b * f_[wx.hi] + wx.c * fxx_[wx.lo] + wx.d * fxx_[wx.hi];
  }
  const auto& wy = loc.axis[1];
  const Index ny = grid_.axis(1).n;
  // Interpolate along x on the two bracketing y-lines, for both the values
  // and their y-second-derivatives, then along y.
  auto along_x = [&](const RealArray<double>& v, const RealArray<double>& vxx, Index j) {
    return wx.a * v[wx.lo * ny + j] + wx.b * v[wx.hi * ny + j] + wx.c * vxx[wx.lo * ny + j] +
           wx.d * vxx[wx.hi * ny + j];
  };
  const double g_lo = along_x(f_, fxx_, wy.lo);
  const double g_hi = along_x(f_, fxx_, wy.hi);
  const double m_lo = along_x(fyy_, fxxyy_, wy.lo);
  const double m_hi = along_x(fyy_, fxxyy_, wy.hi);
  return wy.a * g_lo + wy.b * g_hi + wy.c * m_lo + wy.d * m_hi;
}

}  // namespace bohmflow
