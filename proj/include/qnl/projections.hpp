#pragma once

#include "qnl/spectral.hpp"

namespace qnl {

// Gradient part Q u = grad lap^{-1} div u, mode-wise k (k . u_hat) / |k|^2.
// Wavenumbers are those of `derivative` (a Nyquist component counts as 0),
// so curl(Q u) and div(P u) vanish exactly under the discrete operators.
// The mean mode belongs to P.
SpectralVector leray_q(const SpectralVector& u);
SpectralVector leray_p(const SpectralVector& u);

struct Decomposition {
  SpectralVector solenoidal;  // P u
  SpectralVector gradient;    // Q u
  SpectralScalar potential;   // mean-zero, grad(potential) = Q u
};

Decomposition decompose(const SpectralVector& u);

// Mean-zero scalar whose gradient is Q u.
SpectralScalar gradient_potential(const SpectralVector& u);

}  // namespace qnl
