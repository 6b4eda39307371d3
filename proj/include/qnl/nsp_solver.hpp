#pragma once

// Rescaled compressible Navier-Stokes-Poisson system (c_V = R = 1, phi = lambda Phi):
//   rho_t + div(rho u) = 0
//   rho (u_t + (u.grad) u) + grad(rho theta) + rho grad(phi) / lambda = mu lap u + (mu + nu) grad div u
//   rho (theta_t + u.grad theta) + rho theta div u = kappa lap theta + nu (div u)^2 + 2 mu D(u):D(u)
//   -lambda lap phi = rho - 1
//
// Divided by rho, the only 1/lambda terms are the skew exchange
//   (Q u)_t = -grad(phi) / lambda,   grad(phi)_t = Q u / lambda,
// which is integrated exactly together with the viscous and heat Laplacians;
// everything else is explicit and O(1) in lambda.

#include <span>
#include <string>
#include <vector>

#include "qnl/limit_solver.hpp"
#include "qnl/spectral.hpp"
#include "qnl/stepping.hpp"

namespace qnl {

struct NSPState {
  SpectralScalar rho;
  SpectralVector u;
  SpectralScalar theta;
  SpectralScalar phi;
};

inline constexpr double kRhoFloor = 1e-6;

// Mean-zero phi with -lambda lap phi = rho - 1.
SpectralScalar poisson_solve(const SpectralScalar& rho, double lambda,
                             double mean_tol = kDefaultMeanTol);

// ||-lambda lap phi - (rho - 1)||_{L2}
double poisson_residual(const NSPState& state, double lambda);

struct NSPTendency {
  SpectralScalar rho;    // -div((rho - 1) u): continuity minus its stiff share -div u
  SpectralVector u;      // all momentum terms except -grad(phi)/lambda and the rho = 1 viscous part
  SpectralScalar theta;  // all temperature terms except kappa lap theta
  SpectralScalar phi;    // the potential's share of the continuity residue, lap^{-1} div((rho-1) u) / lambda
};

NSPTendency nsp_rhs_nonstiff(const NSPState& state, const PhysParams& params, double lambda);

NSPState nsp_step(const NSPState& state, const PhysParams& params, double lambda, double dt);

// Exact propagator of the linear part over time h (exposed for testing):
// rotation of (Q u, grad phi) at rate 1/lambda with the viscous damping of Q u,
// mu lap on P u, kappa lap on theta. rho is rebuilt from phi.
NSPState nsp_linear_propagate(const NSPState& state, const PhysParams& params, double lambda, double h);

struct NSPDiagnostics {
  double t = 0.0;
  double mass = 0.0;  // mean of rho
  double min_rho = 0.0;
  double min_theta = 0.0;
  double norm_rho = 0.0;       // ||rho - 1||_{H^s}
  double norm_u = 0.0;         // ||u||_{H^s}
  double norm_theta = 0.0;     // ||theta||_{H^s}
  double norm_grad_phi = 0.0;  // ||grad phi||_{H^{s+1}}
  double poisson_residual = 0.0;
  double energy = 0.0;  // mean of rho |u|^2 / 2 + rho theta + |grad phi|^2 / 2
};

NSPDiagnostics diagnose(double t, const NSPState& state, double lambda, double s);

struct NSPTrajectory {
  std::vector<double> times;
  std::vector<NSPState> snapshots;
  std::vector<NSPDiagnostics> diagnostics;  // one per snapshot
  int steps = 0;
};

// dt = min(cfl h / max|u|, 2 pi lambda / phase_steps, dt_max) per snapshot interval.
struct NSPDtPolicy {
  DtPolicy base;
  double phase_steps = 16.0;
};

double nsp_time_step(const NSPState& state, double lambda, const NSPDtPolicy& policy);

NSPTrajectory run_nsp(const NSPState& initial, const PhysParams& params, double lambda, double t_end,
                      const NSPDtPolicy& policy, std::span<const double> snapshot_times);

std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const NSPDiagnostics& d);

}  // namespace qnl
