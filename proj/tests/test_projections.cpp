#include <doctest.h>

#include <cmath>

#include "qnl/projections.hpp"
#include "support.hpp"

using namespace qnl;
using qnl::test::make_vector;
using qnl::test::random_vector;

namespace {

SpectralScalar sin1(const TorusGrid& g) { return sample(g, [](const auto& x) { return std::sin(x[0]); }); }
SpectralScalar sin2(const TorusGrid& g) { return sample(g, [](const auto& x) { return std::sin(x[1]); }); }

}  // namespace

TEST_CASE("single-mode cases") {
  const auto g = make_grid(2, 16);
  const SpectralScalar zero(g);
  const auto grad_like = make_vector({sin1(g), zero});
  const auto solenoidal = make_vector({sin2(g), zero});

  CHECK(max_abs_coeff(leray_q(grad_like) - grad_like) < 1e-15);
  CHECK(max_abs_coeff(leray_q(solenoidal)) < 1e-15);
  CHECK(max_abs_coeff(leray_q(grad_like + solenoidal) - grad_like) < 1e-15);
  CHECK(max_abs_coeff(leray_p(solenoidal) - solenoidal) < 1e-15);
  CHECK(max_abs_coeff(leray_p(grad_like)) < 1e-15);
}

TEST_CASE("decompose") {
  const auto g = make_grid(2, 16);
  const SpectralScalar zero(g);
  // (sin x1, 0) = grad(-cos x1)
  const auto grad_like = make_vector({sin1(g), zero});
  const auto d = decompose(grad_like);
  CHECK(max_abs_coeff(d.solenoidal) < 1e-15);
  CHECK(max_abs_coeff(d.gradient - grad_like) < 1e-15);
  const auto minus_cos = sample(g, [](const auto& x) { return -std::cos(x[0]); });
  CHECK(max_abs_coeff(d.potential - minus_cos) < 1e-15);

  const auto solenoidal = make_vector({sin2(g), zero});
  const auto e = decompose(solenoidal);
  CHECK(max_abs_coeff(e.solenoidal - solenoidal) < 1e-15);
  CHECK(max_abs_coeff(e.gradient) < 1e-15);
  CHECK(max_abs_coeff(e.potential) < 1e-15);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) {
    const auto u = random_vector(g, rng);
    const auto r = decompose(u);
    CHECK(max_abs_coeff(r.solenoidal + r.gradient - u) < 1e-12 * max_abs_coeff(u));
    CHECK(max_abs_coeff(gradient(r.potential) - r.gradient) < 1e-12);
    CHECK(std::abs(r.potential.mean()) == 0.0);
  }
}

TEST_CASE("projection algebra on random fields") {
  std::mt19937_64 rng(12);
  for (int dims : {2, 3}) {
    const auto g = make_grid(dims, dims == 2 ? 16 : 8);
    for (int i = 0; i < 25; ++i) {
      const auto u = random_vector(g, rng);
      const double n0 = sobolev_norm(u, 0);
      const auto q = leray_q(u);
      const auto p = leray_p(u);
      CHECK(sobolev_norm(leray_q(q) - q, 0) <= 1e-12 * n0);
      CHECK(sobolev_norm(leray_p(p) - p, 0) <= 1e-12 * n0);
      CHECK(sobolev_norm(leray_p(q), 0) <= 1e-12 * n0);
      CHECK(std::abs(inner(p, q)) <= 1e-12 * n0 * n0);
      for (double s : {0.0, 1.0, 2.5, 3.0}) {
        const double whole = std::pow(sobolev_norm(u, s), 2);
        const double parts = std::pow(sobolev_norm(p, s), 2) + std::pow(sobolev_norm(q, s), 2);
        CHECK(std::abs(whole - parts) <= 1e-12 * whole);
      }
      CHECK(max_abs_coeff(curl(q)) <= 1e-12 * max_abs_coeff(u) * g.resolution());
      CHECK(max_abs_coeff(divergence(p)) <= 1e-12 * max_abs_coeff(u) * g.resolution());
    }
  }
}

TEST_CASE("mean mode belongs to P") {
  const auto g = make_grid(2, 8);
  auto u = SpectralVector(g);
  u[0][0] = 2.0;
  CHECK(max_abs_coeff(leray_q(u)) == 0.0);
  CHECK(max_abs_coeff(leray_p(u) - u) == 0.0);
}
