#pragma once

// Fast singular oscillations of the quasineutral expansion.
//
// The pair (grad q, grad p) solves the lambda-free linear transport system
//   d_t grad q + 1/2 Q((v.grad) grad q + (grad q.grad) v + v lap q) - (mu + nu/2) grad div grad q = 0
// (same for grad p), started from (Q u0, grad phi0). The oscillating fields
// are its image under the group at fast time t/lambda, and the corrector
// solves a forced rotation in the fast time tau = t/lambda.

#include <span>
#include <vector>

#include "qnl/limit_solver.hpp"
#include "qnl/nsp_solver.hpp"
#include "qnl/oscillation_group.hpp"

namespace qnl {

GradientPair osc_rhs(const GradientPair& pair, const SpectralVector& v_now, const PhysParams& params);

struct OscNode {
  double t = 0.0;
  GradientPair pair;
  GradientPair rate;
};

class OscTrajectory {
 public:
  OscTrajectory() = default;
  explicit OscTrajectory(std::vector<OscNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<OscNode>& nodes() const noexcept { return nodes_; }
  // Exact node when t hits one, cubic Hermite in between.
  GradientPair at(double t) const;
  // max_t ||pair(t)||_{H^s} / ||pair(0)||_{H^s}; 1 for a zero initial pair.
  double growth(double s) const;

 private:
  std::vector<OscNode> nodes_;
};

// Steps on the limit trajectory's snapshot grid with the advective time step
// of v; v between limit nodes comes from cubic Hermite interpolation.
OscTrajectory solve_osc(const GradientPair& initial, const LimitTrajectory& limit, const PhysParams& params,
                        const DtPolicy& policy);

struct OscillationFields {
  SpectralVector u_osc;
  SpectralVector grad_phi_osc;
  SpectralScalar phi_osc;
  SpectralScalar rho_osc;  // -lap phi_osc
};

OscillationFields build_oscillation(double t, double lambda, const GradientPair& pair);

struct CorrectorForcing {
  SpectralScalar k2;
  SpectralVector k3;
  SpectralVector k4;
  SpectralScalar k5;
};

// Forcings evaluated from the limit and oscillating fields at one (frozen) slow time.
CorrectorForcing corrector_forcing(const LimitState& limit, const OscillationFields& osc,
                                   const PhysParams& params);

struct CorrectorState {
  SpectralVector u_cor;
  SpectralVector grad_phi_cor;
  SpectralScalar theta_cor;

  CorrectorState& axpy(double a, const CorrectorState& o);
  CorrectorState& operator*=(double a);
};

CorrectorState zero_corrector(const TorusGrid& grid);

// d/dtau of the corrector:
//   u_cor' = -grad phi_cor + k4,  grad phi_cor' = u_cor + grad (-lap)^{-1} k2,  theta_cor' = k5.
CorrectorState corrector_rhs(const CorrectorState& state, const CorrectorForcing& forcing);

// Closed-form Duhamel solution at fast time tau from zero data with frozen forcing.
CorrectorState solve_corrector(const CorrectorForcing& forcing, double tau);

SpectralScalar corrector_density(const CorrectorState& cor);    // -div grad phi_cor
SpectralScalar corrector_potential(const CorrectorState& cor);  // potential of Q grad phi_cor

// Truncated expansion
//   rho = 1 + lambda rho_osc [+ lambda^2 (lap Pi + rho_cor)]
//   u   = v + u_osc          [+ lambda u_cor]
//   theta = theta            [+ lambda theta_cor]
//   phi = phi_osc            [+ lambda (Pi + phi_cor)]
NSPState assemble_ansatz(double lambda, const LimitState& limit, const OscillationFields& osc,
                         const CorrectorState* corrector = nullptr);

}  // namespace qnl
