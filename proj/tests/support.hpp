#pragma once

// Shared helpers for the test binaries: seeded random fields and small
// comparisons. Nothing here is used to compute expected values.

#include <cmath>
#include <random>

#include "qnl/oscillation_group.hpp"
#include "qnl/projections.hpp"
#include "qnl/spectral.hpp"

namespace qnl::test {

// Random real field with modes |k_a| <= band and a Gaussian spectral envelope.
inline SpectralScalar random_field(const TorusGrid& grid, std::mt19937_64& rng, int band = -1,
                                   double envelope = 0.0) {
  std::normal_distribution<double> normal;
  std::vector<double> x(grid.size());
  for (auto& v : x) v = normal(rng);
  auto f = transform_forward(grid, x);
  if (band < 0) band = grid.resolution() / 2 - 1;
  return scale_modes(f, [&](const std::array<int, 3>& k, double k2) {
    for (int a = 0; a < grid.dims(); ++a)
      if (std::abs(k[a]) > band) return 0.0;
    return envelope > 0.0 ? std::exp(-k2 / envelope) : 1.0;
  });
}

inline SpectralVector random_vector(const TorusGrid& grid, std::mt19937_64& rng, int band = -1,
                                    double envelope = 0.0) {
  SpectralVector w(grid);
  for (auto& c : w) c = random_field(grid, rng, band, envelope);
  return w;
}

inline SpectralScalar random_mean_zero(const TorusGrid& grid, std::mt19937_64& rng, int band = -1,
                                       double envelope = 0.0) {
  auto f = random_field(grid, rng, band, envelope);
  f[0] = 0.0;
  return f;
}

inline GradientPair random_gradient_pair(const TorusGrid& grid, std::mt19937_64& rng, int band = -1,
                                         double envelope = 0.0) {
  return {leray_q(random_vector(grid, rng, band, envelope)), leray_q(random_vector(grid, rng, band, envelope))};
}

inline SpectralVector random_solenoidal(const TorusGrid& grid, std::mt19937_64& rng, int band = -1,
                                        double envelope = 0.0) {
  auto w = leray_p(random_vector(grid, rng, band, envelope));
  for (auto& c : w) c[0] = 0.0;
  return w;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline SpectralVector make_vector(std::vector<SpectralScalar> comps) { return SpectralVector(std::move(comps)); }

inline double sobolev_distance(const SpectralVector& a, const SpectralVector& b, double s) {
  return sobolev_norm(a - b, s);
}

inline double sobolev_distance(const SpectralScalar& a, const SpectralScalar& b, double s) {
  return sobolev_norm(a - b, s);
}

inline double pair_distance(const GradientPair& a, const GradientPair& b, double s) {
  auto d = a;
  d.axpy(-1.0, b);
  return sobolev_norm(d, s);
}

}  // namespace qnl::test
