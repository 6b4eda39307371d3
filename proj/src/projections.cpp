#include "qnl/projections.hpp"

namespace qnl {
namespace {

// Derivative wavevector of a flat index: true wavenumbers with Nyquist entries zeroed.
std::array<double, 3> derivative_wavevector(const TorusGrid& grid, std::size_t flat) {
  const auto idx = grid.unravel(flat);
  std::array<double, 3> k{0.0, 0.0, 0.0};
  for (int a = 0; a < grid.dims(); ++a)
    k[a] = grid.is_nyquist(idx[a]) ? 0.0 : static_cast<double>(grid.wavenumber(idx[a]));
  return k;
}

}  // namespace

SpectralVector leray_q(const SpectralVector& u) {
  const auto& grid = u.grid();
  const int dims = grid.dims();
  SpectralVector out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = derivative_wavevector(grid, i);
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0.0) continue;
    Complex kdotu = 0.0;
    for (int a = 0; a < dims; ++a) kdotu += k[a] * u[a][i];
    for (int a = 0; a < dims; ++a) out[a][i] = k[a] * kdotu / k2;
  }
  return out;
}

SpectralVector leray_p(const SpectralVector& u) { return u - leray_q(u); }

SpectralScalar gradient_potential(const SpectralVector& u) {
  const auto& grid = u.grid();
  SpectralScalar out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = derivative_wavevector(grid, i);
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0.0) continue;
    Complex kdotu = 0.0;
    for (int a = 0; a < grid.dims(); ++a) kdotu += k[a] * u[a][i];
    out[i] = Complex(0.0, -1.0) * kdotu / k2;
  }
  return out;
}

Decomposition decompose(const SpectralVector& u) {
  auto q = leray_q(u);
  auto p = u - q;
  return {std::move(p), std::move(q), gradient_potential(u)};
}

}  // namespace qnl
