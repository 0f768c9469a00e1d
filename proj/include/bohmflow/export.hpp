#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "bohmflow/grid.hpp"

namespace bohmflow {

/// "%.17g", with "nan" for NaN so output never depends on the sign bit.
std::string format_real(double v);

/// Axis descriptor "x:min:max:n[;y:min:max:n]".
std::string axes_descriptor(const Grid& g);

/// Header "# ξ=<xi> axes=<...>" (plus `extra` when given), then one value
/// per line in row-major order. Masked entries are written as nan.
std::string grid_csv(const Grid& g, double xi, const RealArray<double>& values, const BoolArray* mask = nullptr,
                     const std::string& extra = "");

/// Same layout, two comma-separated columns (re,im) per line.
std::string complex_grid_csv(const Grid& g, double xi, const ComplexArray<double>& values,
                             const std::string& extra = "");

/// Plain (P2) 16-bit PGM of a row-major width x height image. Values are
/// mapped linearly from [0, max] to [0, 65535]; max is recorded in a
/// header comment. Negative and NaN inputs map to 0.
std::string pgm16(const RealArray<double>& values, Index width, Index height);

/// Writes `contents` byte for byte; IOError on failure.
void write_file(const std::filesystem::path& path, const std::string& contents);

/// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& bytes);

}  // namespace bohmflow
