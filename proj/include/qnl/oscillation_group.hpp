#pragma once

// The rotation group acting on pairs of gradient fields. Its generator maps
// (grad q, grad psi) to (-grad psi, grad q), so exp(tau L) is the rotation
//   (a, b) -> (a cos tau - b sin tau, a sin tau + b cos tau),
// an isometry in every H^s. Divergence-free fields are left alone by L; the
// group is only ever applied to gradient parts and callers carry P u aside.

#include "qnl/spectral.hpp"

namespace qnl {

struct GradientPair {
  SpectralVector grad_q;
  SpectralVector grad_psi;

  GradientPair& operator+=(const GradientPair& o);
  GradientPair& operator*=(double a);
  GradientPair& axpy(double a, const GradientPair& o);
  friend GradientPair operator+(GradientPair a, const GradientPair& b) { return a += b; }
  friend GradientPair operator*(double a, GradientPair p) { return p *= a; }
};

inline constexpr double kGradientTol = 1e-10;

// Throws NotGradient unless both components are fixed points of leray_q.
void require_gradient_pair(const GradientPair& pair, double tol = kGradientTol);

GradientPair generator(const GradientPair& pair);
GradientPair apply_group(double tau, const GradientPair& pair);

// Rotation of an arbitrary pair of vector fields, no gradient check.
GradientPair rotate(double tau, const GradientPair& pair);

// The slow variable V = exp(-t/lambda L) (Q u, grad phi).
GradientPair filter_state(double t, double lambda, const SpectralVector& u,
                          const SpectralVector& grad_phi);

double sobolev_norm(const GradientPair& pair, double s);
double inner(const GradientPair& x, const GradientPair& y);

}  // namespace qnl
