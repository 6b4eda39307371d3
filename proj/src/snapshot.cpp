#include "qnl/snapshot.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "qnl/error.hpp"

namespace qnl {
namespace {

constexpr std::array<char, 4> kMagic{'Q', 'N', 'L', '1'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits;
  std::memcpy(&bits, &value, sizeof(T));
  char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(buf, sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T)))
    throw Error(ErrorCode::Io, "truncated snapshot");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(buf[i]) << (8 * i);
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

void write_header(std::ostream& out, const TorusGrid& grid, FieldKind kind) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::int32_t>(out, grid.dims());
  put_le<std::int32_t>(out, grid.resolution());
  put_le<std::int32_t>(out, static_cast<std::int32_t>(kind));
}

void write_coeffs(std::ostream& out, const SpectralScalar& f) {
  for (const auto& c : f.coeffs()) {
    put_le<double>(out, c.real());
    put_le<double>(out, c.imag());
  }
}

SpectralScalar read_coeffs(std::istream& in, const TorusGrid& grid) {
  std::vector<Complex> coeffs(grid.size());
  for (auto& c : coeffs) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    c = Complex(re, im);
  }
  return SpectralScalar(grid, std::move(coeffs));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const SpectralScalar& f) {
  auto out = open_out(path);
  write_header(out, f.grid(), FieldKind::Scalar);
  write_coeffs(out, f);
}

void write_snapshot(const std::filesystem::path& path, const SpectralVector& u) {
  auto out = open_out(path);
  write_header(out, u.grid(), FieldKind::Vector);
  for (const auto& c : u) write_coeffs(out, c);
}

Field read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw Error(ErrorCode::Io, path.string() + " is not a QNL1 snapshot");
  const int dims = get_le<std::int32_t>(in);
  const int n = get_le<std::int32_t>(in);
  const int kind = get_le<std::int32_t>(in);
  const TorusGrid grid = make_grid(dims, n);
  if (kind == static_cast<int>(FieldKind::Scalar)) return read_coeffs(in, grid);
  if (kind != static_cast<int>(FieldKind::Vector))
    throw Error(ErrorCode::Io, "unknown field kind " + std::to_string(kind));
  std::vector<SpectralScalar> comps;
  for (int a = 0; a < dims; ++a) comps.push_back(read_coeffs(in, grid));
  return SpectralVector(std::move(comps));
}

}  // namespace qnl
