#include <doctest.h>

#include <cmath>

#include "qnl/error.hpp"
#include "qnl/oscillation_group.hpp"
#include "support.hpp"

using namespace qnl;
using qnl::test::pair_distance;
using qnl::test::random_gradient_pair;

namespace {

const double pi = std::acos(-1.0);

GradientPair single_mode_pair(const TorusGrid& g) {
  return {gradient(sample(g, [](const auto& x) { return std::sin(x[0]); })),
          gradient(sample(g, [](const auto& x) { return std::cos(2.0 * x[1]); }))};
}

}  // namespace

TEST_CASE("generator") {
  const auto g = make_grid(2, 16);
  const auto p = single_mode_pair(g);
  const SpectralVector zero(g);

  const auto a = generator({p.grad_q, zero});
  CHECK(max_abs_coeff(a.grad_q) == 0.0);
  CHECK(max_abs_coeff(a.grad_psi - p.grad_q) == 0.0);
  const auto b = generator({zero, p.grad_psi});
  CHECK(max_abs_coeff(b.grad_q + p.grad_psi) == 0.0);
  CHECK(max_abs_coeff(b.grad_psi) == 0.0);

  std::mt19937_64 rng(21);
  for (int i = 0; i < 10; ++i) {
    const auto x = random_gradient_pair(g, rng);
    auto twice = generator(generator(x));
    twice.axpy(1.0, x);
    CHECK(sobolev_norm(twice, 0) < 1e-14 * sobolev_norm(x, 0));
    // skew
    CHECK(std::abs(inner(generator(x), x)) < 1e-12 * std::pow(sobolev_norm(x, 0), 2));
  }
}

TEST_CASE("group closed forms") {
  const auto g = make_grid(2, 16);
  std::mt19937_64 rng(22);
  const auto x = random_gradient_pair(g, rng);
  const double n = sobolev_norm(x, 0);
  CHECK(pair_distance(apply_group(0.0, x), x, 0) == 0.0);
  const auto quarter = apply_group(pi / 2, x);
  CHECK(sobolev_norm(quarter.grad_q + x.grad_psi, 0) < 1e-15 * n);
  CHECK(sobolev_norm(quarter.grad_psi - x.grad_q, 0) < 1e-15 * n);
  CHECK(pair_distance(apply_group(2 * pi, x), x, 0) < 1e-14 * n);
  for (int s = 0; s <= 3; ++s)
    CHECK(std::abs(sobolev_norm(apply_group(0.37, x), s) - sobolev_norm(x, s)) < 1e-12 * sobolev_norm(x, s));
}

TEST_CASE("group law and isometry on random pairs") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> normal(0.0, 5.0);
  for (int dims : {2, 3}) {
    const auto g = make_grid(dims, dims == 2 ? 16 : 8);
    for (int i = 0; i < 20; ++i) {
      const auto x = random_gradient_pair(g, rng);
      const double t1 = normal(rng), t2 = normal(rng);
      for (int s = 0; s <= 3; ++s) {
        const double ref = sobolev_norm(x, s);
        CHECK(std::abs(sobolev_norm(apply_group(t1, x), s) - ref) <= 1e-12 * ref);
        CHECK(pair_distance(apply_group(t1, apply_group(t2, x)), apply_group(t1 + t2, x), s) <= 1e-12 * ref);
      }
    }
  }
}

TEST_CASE("non-gradient input is rejected") {
  const auto g = make_grid(2, 16);
  const SpectralVector zero(g);
  std::vector<SpectralScalar> comps{sample(g, [](const auto& x) { return std::sin(x[1]); }), SpectralScalar(g)};
  const GradientPair bad{SpectralVector(comps), zero};
  try {
    apply_group(1.0, bad);
    FAIL("expected NotGradient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotGradient);
  }
}

TEST_CASE("filter state") {
  const auto g = make_grid(2, 16);
  std::mt19937_64 rng(24);
  const auto x = random_gradient_pair(g, rng);
  const auto w = qnl::test::random_solenoidal(g, rng);
  const double lambda = 0.07;

  // t = 0 keeps (Q u, grad phi)
  CHECK(pair_distance(filter_state(0.0, lambda, x.grad_q + w, x.grad_psi), x, 0) < 1e-13);

  // free rotation solution gives a constant filtered state
  for (double t : {0.1, 0.33, 1.7}) {
    const double c = std::cos(t / lambda), s = std::sin(t / lambda);
    const auto u = c * x.grad_q - s * x.grad_psi + w;
    const auto e = s * x.grad_q + c * x.grad_psi;
    CHECK(pair_distance(filter_state(t, lambda, u, e), x, 0) < 1e-13 * sobolev_norm(x, 0));
  }

  // divergence-free velocity: only the field rotates
  const double t = 0.25;
  const auto f = filter_state(t, lambda, w, x.grad_psi);
  const double a = -t / lambda;
  CHECK(sobolev_norm(f.grad_q - (-std::sin(a)) * x.grad_psi, 0) < 1e-13);
  CHECK(sobolev_norm(f.grad_psi - std::cos(a) * x.grad_psi, 0) < 1e-13);

  CHECK_THROWS_AS(filter_state(1.0, 0.0, w, x.grad_psi), Error);
}
