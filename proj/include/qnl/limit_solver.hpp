#pragma once

// Incompressible Navier-Stokes with temperature on the torus:
//   div v = 0,
//   v_t + (v.grad) v + grad Pi = mu lap v,
//   theta_t + v.grad theta = kappa lap theta + (mu/2) sum_ij (d_i v_j + d_j v_i)^2,
// and the Euler system when mu = nu = kappa = 0. Pressure is removed by the
// Leray projection while stepping and reconstructed on demand.

#include <span>
#include <vector>

#include "qnl/spectral.hpp"
#include "qnl/stepping.hpp"

namespace qnl {

// c_V = R = 1 throughout.
struct PhysParams {
  double mu = 0.0;
  double nu = 0.0;
  double kappa = 0.0;

  bool inviscid() const noexcept { return mu == 0.0 && nu == 0.0 && kappa == 0.0; }
};

enum class FlowMode { NavierStokes, Euler };

// NS: mu > 0, 2 mu + N nu > 0, kappa >= 0. Euler: everything zero.
void validate(const PhysParams& params, FlowMode mode, int dims);

struct LimitState {
  SpectralVector v;
  SpectralScalar theta;
  SpectralScalar pi;

  LimitState& axpy(double a, const LimitState& o);
  LimitState& operator*=(double a);
};

// d/dt of (v, theta); pi is unused.
using LimitTendency = LimitState;

inline constexpr double kDivergenceTol = 1e-10;

// Full tendency including the diffusion terms.
LimitTendency ns_rhs(const LimitState& state, const PhysParams& params);

// (mu/2) sum_ij (d_i v_j + d_j v_i)^2, i.e. 2 mu D(v):D(v).
SpectralScalar viscous_heating(const SpectralVector& v, double mu);

// Mean-zero Pi with lap Pi = -div((v.grad) v).
SpectralScalar recover_pressure(const LimitState& state);

LimitState limit_step(const LimitState& state, const PhysParams& params, double dt);

struct LimitNode {
  double t = 0.0;
  LimitState state;  // pi filled in
  LimitTendency rate;
};

// Every accepted step is kept so that v can be sampled at arbitrary times.
class LimitTrajectory {
 public:
  LimitTrajectory() = default;
  explicit LimitTrajectory(std::vector<LimitNode> nodes, std::vector<double> snapshot_times);

  const std::vector<LimitNode>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& snapshot_times() const noexcept { return snapshot_times_; }
  double t_end() const { return nodes_.back().t; }

  // Exact node when t hits one, cubic Hermite in between. pi is interpolated linearly.
  LimitState at(double t) const;
  SpectralVector velocity_at(double t) const { return at(t).v; }

 private:
  std::vector<LimitNode> nodes_;
  std::vector<double> snapshot_times_;
};

LimitTrajectory run_limit(const LimitState& initial, const PhysParams& params, double t_end,
                          const DtPolicy& policy, std::span<const double> snapshot_times);

// Advective bound 0.5 h / max|v| capped by dt_max (diffusion is integrated exactly).
double limit_time_step(const SpectralVector& v, const DtPolicy& policy);

}  // namespace qnl
