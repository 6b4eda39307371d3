#include "qnl/limit_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qnl/error.hpp"
#include "qnl/projections.hpp"

namespace qnl {

void validate(const PhysParams& params, FlowMode mode, int dims) {
  if (mode == FlowMode::Euler) {
    if (!params.inviscid())
      throw Error(ErrorCode::InvalidParams, "Euler mode requires mu = nu = kappa = 0");
    return;
  }
  if (!(params.mu > 0.0)) throw Error(ErrorCode::InvalidParams, "mu must be positive");
  if (!(2.0 * params.mu + dims * params.nu > 0.0))
    throw Error(ErrorCode::InvalidParams, "2 mu + N nu must be positive");
  if (params.kappa < 0.0) throw Error(ErrorCode::InvalidParams, "kappa must be non-negative");
}

LimitState& LimitState::axpy(double a, const LimitState& o) {
  v.axpy(a, o.v);
  theta.axpy(a, o.theta);
  return *this;
}

LimitState& LimitState::operator*=(double a) {
  v *= a;
  theta *= a;
  return *this;
}

SpectralScalar viscous_heating(const SpectralVector& v, double mu) {
  SpectralScalar out(v.grid());
  if (mu == 0.0) return out;
  const int dims = v.grid().dims();
  for (int i = 0; i < dims; ++i) {
    for (int j = 0; j < dims; ++j) {
      const auto sij = derivative(v[j], i) + derivative(v[i], j);
      out.axpy(0.5 * mu, product(sij, sij));
    }
  }
  return out;
}

namespace {

LimitTendency nonlinear(const LimitState& state, const PhysParams& params) {
  LimitTendency rate;
  rate.v = leray_p(-advect(state.v, state.v));
  rate.theta = viscous_heating(state.v, params.mu) - advect(state.v, state.theta);
  rate.pi = SpectralScalar(state.theta.grid());
  return rate;
}

LimitState propagate(const LimitState& y, double h, const PhysParams& params) {
  LimitState out;
  out.v = SpectralVector(y.v.grid());
  for (std::size_t a = 0; a < y.v.size(); ++a)
    out.v[a] = scale_modes(y.v[a], [&](const auto&, double k2) { return std::exp(-params.mu * k2 * h); });
  out.theta =
      scale_modes(y.theta, [&](const auto&, double k2) { return std::exp(-params.kappa * k2 * h); });
  out.pi = y.pi;
  return out;
}

}  // namespace

LimitTendency ns_rhs(const LimitState& state, const PhysParams& params) {
  auto rate = nonlinear(state, params);
  rate.v.axpy(params.mu, laplacian(state.v));
  rate.theta.axpy(params.kappa, laplacian(state.theta));
  return rate;
}

SpectralScalar recover_pressure(const LimitState& state) {
  return inverse_laplacian(-divergence(advect(state.v, state.v)));
}

LimitState limit_step(const LimitState& state, const PhysParams& params, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidTimeStep, "dt must be positive");
  auto out = lawson_rk4(
      state, dt, [&](const LimitState& y, double) { return nonlinear(y, params); },
      [&](const LimitState& y, double h) { return propagate(y, h, params); },
      [](LimitState& y) { y.v = leray_p(y.v); });
  out.pi = recover_pressure(out);
  return out;
}

double limit_time_step(const SpectralVector& v, const DtPolicy& policy) {
  if (policy.fixed_dt > 0.0) return policy.fixed_dt;
  const double vmax = max_abs_value(v);
  const double advective = vmax > 0.0 ? policy.cfl * v.grid().spacing() / vmax : policy.dt_max;
  return std::min(advective, policy.dt_max);
}

LimitTrajectory::LimitTrajectory(std::vector<LimitNode> nodes, std::vector<double> snapshot_times)
    : nodes_(std::move(nodes)), snapshot_times_(std::move(snapshot_times)) {}

LimitState LimitTrajectory::at(double t) const {
  if (nodes_.empty()) throw Error(ErrorCode::TimeGridMismatch, "empty trajectory");
  const double tol = 1e-12 * std::max(1.0, t_end());
  if (t < nodes_.front().t - tol || t > nodes_.back().t + tol)
    throw Error(ErrorCode::TimeGridMismatch, "time " + std::to_string(t) + " outside trajectory");
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t,
                             [](const LimitNode& n, double value) { return n.t < value; });
  if (it != nodes_.end() && std::abs(it->t - t) <= tol) return it->state;
  if (it != nodes_.begin() && std::abs(std::prev(it)->t - t) <= tol) return std::prev(it)->state;
  const auto& n1 = *it;
  const auto& n0 = *std::prev(it);
  const double h = n1.t - n0.t;
  const double s = (t - n0.t) / h;
  const auto w = hermite_weights(s, h);
  LimitState out = n0.state;
  out *= w[0];
  out.axpy(w[1], n0.rate);
  out.axpy(w[2], n1.state);
  out.axpy(w[3], n1.rate);
  out.pi = (1.0 - s) * n0.state.pi + s * n1.state.pi;
  return out;
}

LimitTrajectory run_limit(const LimitState& initial, const PhysParams& params, double t_end,
                          const DtPolicy& policy, std::span<const double> snapshot_times) {
  const auto times = normalize_snapshot_times(snapshot_times, t_end);
  if (max_abs_coeff(divergence(initial.v)) > kDivergenceTol)
    throw Error(ErrorCode::NotDivergenceFree, "initial velocity is not divergence-free");
  if (!(min_value(initial.theta) > 0.0))
    throw Error(ErrorCode::NonpositiveTemperature, "initial temperature must be positive");

  const double s = policy.guard_sobolev_index;
  const double limit = policy.guard_factor * std::max(1.0, sobolev_norm(initial.v, s));

  std::vector<LimitNode> nodes;
  LimitState state = initial;
  state.pi = recover_pressure(state);
  double t = 0.0;
  nodes.push_back({t, state, ns_rhs(state, params)});

  for (std::size_t seg = 1; seg < times.size(); ++seg) {
    const auto plan = plan_substeps(t, times[seg], limit_time_step(state.v, policy));
    for (int i = 0; i < plan.count; ++i) {
      state = limit_step(state, params, plan.dt);
      t = (i + 1 == plan.count) ? times[seg] : t + plan.dt;
      if (!(sobolev_norm(state.v, s) <= limit))
        throw Error(ErrorCode::BlowUp, "velocity norm exceeded guard at t = " + std::to_string(t));
      if (!(min_value(state.theta) > 0.0))
        throw Error(ErrorCode::NonpositiveTemperature,
                    "temperature reached " + std::to_string(min_value(state.theta)) +
                        " at t = " + std::to_string(t));
      nodes.push_back({t, state, ns_rhs(state, params)});
    }
  }
  return LimitTrajectory(std::move(nodes), times);
}

}  // namespace qnl
