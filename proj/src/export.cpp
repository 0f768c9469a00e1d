#include "bohmflow/export.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>

namespace bohmflow {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string axes_descriptor(const Grid& g) {
  static const char* names[] = {"x", "y"};
  std::string out;
  for (int a = 0; a < g.dimension(); ++a) {
    const auto& ax = g.axis(a);
    if (a) out += ';';
    out += std::string(names[a]) + ":" + format_real(ax.x_min) + ":" + format_real(ax.x_max) + ":" +
           std::to_string(ax.n);
  }
  return out;
}

namespace {

std::string header(const Grid& g, double xi, const std::string& extra) {
  std::string h = "# \xCE\xBE=" + format_real(xi) + " axes=" + axes_descriptor(g);
  if (!extra.empty()) h += " " + extra;
  return h + "\n";
}

}  // namespace

std::string grid_csv(const Grid& g, double xi, const RealArray<double>& values, const BoolArray* mask,
                     const std::string& extra) {
  if (values.size() != g.size()) throw GridMismatch("grid_csv: value count does not match grid");
  std::string out = header(g, xi, extra);
  out.reserve(out.size() + static_cast<std::size_t>(values.size()) * 24);
  for (Index p = 0; p < values.size(); ++p) {
    out += (mask && (*mask)[p]) ? std::string("nan") : format_real(values[p]);
    out += '\n';
  }
  return out;
}

std::string complex_grid_csv(const Grid& g, double xi, const ComplexArray<double>& values, const std::string& extra) {
  if (values.size() != g.size()) throw GridMismatch("complex_grid_csv: value count does not match grid");
  std::string out = header(g, xi, extra);
  for (Index p = 0; p < values.size(); ++p) {
    out += format_real(values[p].real()) + "," + format_real(values[p].imag()) + "\n";
  }
  return out;
}

std::string pgm16(const RealArray<double>& values, Index width, Index height) {
  if (values.size() != width * height) throw GridMismatch("pgm16: value count does not match image size");
  double peak = 0;
  for (Index i = 0; i < values.size(); ++i) {
    if (std::isfinite(values[i])) peak = std::max(peak, values[i]);
  }
  std::string out = "P2\n# max=" + format_real(peak) + "\n" + std::to_string(width) + " " + std::to_string(height) +
                    "\n65535\n";
  for (Index r = 0; r < height; ++r) {
    for (Index c = 0; c < width; ++c) {
      const double v = values[r * width + c];
      long level = 0;
      if (peak > 0 && std::isfinite(v) && v > 0) level = std::lround(std::min(v / peak, 1.0) * 65535.0);
      if (c) out += ' ';
      out += std::to_string(level);
    }
    out += '\n';
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IOError("cannot open " + path.string() + " for writing");
  f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!f) throw IOError("failed writing " + path.string());
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace bohmflow
