#include "qnl/oscillation_group.hpp"

#include <cmath>

#include "qnl/error.hpp"
#include "qnl/projections.hpp"

namespace qnl {

GradientPair& GradientPair::operator+=(const GradientPair& o) { return axpy(1.0, o); }

GradientPair& GradientPair::operator*=(double a) {
  grad_q *= a;
  grad_psi *= a;
  return *this;
}

GradientPair& GradientPair::axpy(double a, const GradientPair& o) {
  grad_q.axpy(a, o.grad_q);
  grad_psi.axpy(a, o.grad_psi);
  return *this;
}

namespace {

void require_gradient(const SpectralVector& w, double tol, const char* name) {
  const double scale = std::max(1.0, sobolev_norm(w, 0.0));
  const double defect = sobolev_norm(leray_q(w) - w, 0.0);
  if (defect > tol * scale)
    throw Error(ErrorCode::NotGradient,
                std::string(name) + " is not a gradient field (defect " + std::to_string(defect) + ")");
}

}  // namespace

void require_gradient_pair(const GradientPair& pair, double tol) {
  require_same_grid(pair.grad_q.grid(), pair.grad_psi.grid());
  require_gradient(pair.grad_q, tol, "first component");
  require_gradient(pair.grad_psi, tol, "second component");
}

GradientPair generator(const GradientPair& pair) {
  require_gradient_pair(pair);
  return {-pair.grad_psi, pair.grad_q};
}

GradientPair rotate(double tau, const GradientPair& pair) {
  const double c = std::cos(tau);
  const double s = std::sin(tau);
  GradientPair out{c * pair.grad_q, s * pair.grad_q};
  out.grad_q.axpy(-s, pair.grad_psi);
  out.grad_psi.axpy(c, pair.grad_psi);
  return out;
}

GradientPair apply_group(double tau, const GradientPair& pair) {
  require_gradient_pair(pair);
  return rotate(tau, pair);
}

GradientPair filter_state(double t, double lambda, const SpectralVector& u,
                          const SpectralVector& grad_phi) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidLambda, "lambda must be positive");
  return apply_group(-t / lambda, {leray_q(u), grad_phi});
}

double sobolev_norm(const GradientPair& pair, double s) {
  return std::hypot(sobolev_norm(pair.grad_q, s), sobolev_norm(pair.grad_psi, s));
}

double inner(const GradientPair& x, const GradientPair& y) {
  return inner(x.grad_q, y.grad_q) + inner(x.grad_psi, y.grad_psi);
}

}  // namespace qnl
