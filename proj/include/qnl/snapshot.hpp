#pragma once

// Binary field snapshots. Layout, all little-endian:
//   "QNL1" | int32 dims | int32 resolution | int32 kind (0 scalar, 1 vector)
//   then per component the row-major coefficients as (re, im) float64 pairs.

#include <filesystem>
#include <variant>

#include "qnl/spectral.hpp"

namespace qnl {

enum class FieldKind : int { Scalar = 0, Vector = 1 };

using Field = std::variant<SpectralScalar, SpectralVector>;

void write_snapshot(const std::filesystem::path& path, const SpectralScalar& f);
void write_snapshot(const std::filesystem::path& path, const SpectralVector& u);
Field read_snapshot(const std::filesystem::path& path);

}  // namespace qnl
