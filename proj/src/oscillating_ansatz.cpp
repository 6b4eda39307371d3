#include "qnl/oscillating_ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qnl/error.hpp"
#include "qnl/projections.hpp"

namespace qnl {

namespace {

SpectralVector transport(const SpectralVector& c, const SpectralVector& v) {
  auto out = advect(v, c);
  out += advect(c, v);
  out += scale(divergence(c), v);
  return leray_q(out);
}

GradientPair transport(const GradientPair& pair, const SpectralVector& v) {
  return {-0.5 * transport(pair.grad_q, v), -0.5 * transport(pair.grad_psi, v)};
}

GradientPair diffuse(const GradientPair& pair, double coeff, double h) {
  auto factor = [&](const std::array<int, 3>&, double k2) { return std::exp(-coeff * k2 * h); };
  GradientPair out = pair;
  for (std::size_t a = 0; a < pair.grad_q.size(); ++a) {
    out.grad_q[a] = scale_modes(pair.grad_q[a], factor);
    out.grad_psi[a] = scale_modes(pair.grad_psi[a], factor);
  }
  return out;
}

}  // namespace

GradientPair osc_rhs(const GradientPair& pair, const SpectralVector& v_now, const PhysParams& params) {
  auto rate = transport(pair, v_now);
  const double coeff = params.mu + 0.5 * params.nu;
  rate.grad_q.axpy(coeff, gradient(divergence(pair.grad_q)));
  rate.grad_psi.axpy(coeff, gradient(divergence(pair.grad_psi)));
  return rate;
}

GradientPair OscTrajectory::at(double t) const {
  if (nodes_.empty()) throw Error(ErrorCode::TimeGridMismatch, "empty oscillation trajectory");
  const double tol = 1e-12 * std::max(1.0, nodes_.back().t);
  if (t < nodes_.front().t - tol || t > nodes_.back().t + tol)
    throw Error(ErrorCode::TimeGridMismatch, "time " + std::to_string(t) + " outside trajectory");
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t,
                             [](const OscNode& n, double value) { return n.t < value; });
  if (it != nodes_.end() && std::abs(it->t - t) <= tol) return it->pair;
  if (it != nodes_.begin() && std::abs(std::prev(it)->t - t) <= tol) return std::prev(it)->pair;
  const auto& n0 = *std::prev(it);
  const auto& n1 = *it;
  const double h = n1.t - n0.t;
  const auto w = hermite_weights((t - n0.t) / h, h);
  GradientPair out = n0.pair;
  out *= w[0];
  out.axpy(w[1], n0.rate);
  out.axpy(w[2], n1.pair);
  out.axpy(w[3], n1.rate);
  return out;
}

double OscTrajectory::growth(double s) const {
  const double base = sobolev_norm(nodes_.front().pair, s);
  if (base == 0.0) return 1.0;
  double worst = 0.0;
  for (const auto& n : nodes_) worst = std::max(worst, sobolev_norm(n.pair, s) / base);
  return worst;
}

OscTrajectory solve_osc(const GradientPair& initial, const LimitTrajectory& limit, const PhysParams& params,
                        const DtPolicy& policy) {
  require_gradient_pair(initial);
  const auto& times = limit.snapshot_times();
  const double s = policy.guard_sobolev_index;
  const double guard = policy.guard_factor * std::max(1.0, sobolev_norm(initial, s));
  const double coeff = params.mu + 0.5 * params.nu;

  std::vector<OscNode> nodes;
  GradientPair pair = initial;
  double t = times.front();
  nodes.push_back({t, pair, osc_rhs(pair, limit.velocity_at(t), params)});

  for (std::size_t seg = 1; seg < times.size(); ++seg) {
    const auto plan = plan_substeps(t, times[seg], limit_time_step(limit.velocity_at(t), policy));
    for (int i = 0; i < plan.count; ++i) {
      const double t0 = t;
      pair = lawson_rk4(
          pair, plan.dt,
          [&](const GradientPair& y, double c) { return transport(y, limit.velocity_at(t0 + c)); },
          [&](const GradientPair& y, double h) { return diffuse(y, coeff, h); },
          [](GradientPair& y) {
            y.grad_q = leray_q(y.grad_q);
            y.grad_psi = leray_q(y.grad_psi);
          });
      t = (i + 1 == plan.count) ? times[seg] : t + plan.dt;
      if (!(sobolev_norm(pair, s) <= guard))
        throw Error(ErrorCode::BlowUp, "oscillation pair exceeded guard at t = " + std::to_string(t));
      nodes.push_back({t, pair, osc_rhs(pair, limit.velocity_at(t), params)});
    }
  }
  return OscTrajectory(std::move(nodes));
}

OscillationFields build_oscillation(double t, double lambda, const GradientPair& pair) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidLambda, "lambda must be positive");
  auto rotated = apply_group(t / lambda, pair);
  OscillationFields out;
  out.phi_osc = gradient_potential(rotated.grad_psi);
  out.rho_osc = -divergence(rotated.grad_psi);
  out.u_osc = std::move(rotated.grad_q);
  out.grad_phi_osc = std::move(rotated.grad_psi);
  return out;
}

CorrectorForcing corrector_forcing(const LimitState& limit, const OscillationFields& osc,
                                   const PhysParams& params) {
  const auto& v = limit.v;
  const auto& u = osc.u_osc;
  const auto& g = osc.grad_phi_osc;
  const double damp = params.mu + 0.5 * params.nu;
  const auto div_u = divergence(u);
  const auto div_g = divergence(g);  // lap phi_osc
  const int dims = v.grid().dims();

  CorrectorForcing f;

  auto carrier = v + u;
  auto transport_g = advect(v, g);
  transport_g += advect(g, v);
  transport_g += scale(div_g, v);
  f.k2 = divergence(scale(osc.rho_osc, carrier));
  f.k2.axpy(0.5, divergence(transport_g));
  f.k2.axpy(-damp, laplacian(laplacian(osc.phi_osc)));

  auto cross = advect(v, u);
  cross += advect(u, v);
  const auto skew = cross - scale(div_u, v);  // (v.grad)u + (u.grad)v - v div u
  f.k3 = 0.5 * leray_q(skew);
  f.k3 += advect(u, u);
  f.k3 += leray_p(cross);
  f.k3.axpy(damp, gradient(div_u));

  f.k4 = -f.k3;
  f.k4 -= gradient(limit.theta);
  f.k4.axpy(params.mu, laplacian(u));
  f.k4.axpy(params.mu + params.nu, gradient(div_u));

  f.k5 = -advect(u, limit.theta);
  f.k5 -= product(limit.theta, div_u);
  f.k5.axpy(params.nu, product(div_u, div_u));
  if (params.mu != 0.0) {
    for (int i = 0; i < dims; ++i) {
      for (int j = 0; j < dims; ++j) {
        auto sij = derivative(v[j], i) + derivative(v[i], j);
        sij += derivative(u[j], i);
        sij += derivative(u[i], j);
        f.k5.axpy(0.5 * params.mu, product(sij, sij));
      }
    }
  }
  return f;
}

CorrectorState& CorrectorState::axpy(double a, const CorrectorState& o) {
  u_cor.axpy(a, o.u_cor);
  grad_phi_cor.axpy(a, o.grad_phi_cor);
  theta_cor.axpy(a, o.theta_cor);
  return *this;
}

CorrectorState& CorrectorState::operator*=(double a) {
  u_cor *= a;
  grad_phi_cor *= a;
  theta_cor *= a;
  return *this;
}

CorrectorState zero_corrector(const TorusGrid& grid) {
  return {SpectralVector(grid), SpectralVector(grid), SpectralScalar(grid)};
}

namespace {

SpectralVector electric_forcing(const SpectralScalar& k2) {
  // grad (-lap)^{-1} k2; throws NonZeroMean for an inconsistent assembly
  return -gradient(inverse_laplacian(k2));
}

}  // namespace

CorrectorState corrector_rhs(const CorrectorState& state, const CorrectorForcing& forcing) {
  CorrectorState rate;
  rate.u_cor = forcing.k4 - state.grad_phi_cor;
  rate.grad_phi_cor = state.u_cor + electric_forcing(forcing.k2);
  rate.theta_cor = forcing.k5;
  return rate;
}

CorrectorState solve_corrector(const CorrectorForcing& forcing, double tau) {
  // X(tau) = int_0^tau R(sigma) F dsigma for the rotation R, F = (k4, G):
  //   first  = sin(tau) k4 - (1 - cos(tau)) G
  //   second = (1 - cos(tau)) k4 + sin(tau) G
  const auto g = electric_forcing(forcing.k2);
  const double s = std::sin(tau);
  const double c1 = 2.0 * std::sin(0.5 * tau) * std::sin(0.5 * tau);  // 1 - cos(tau)
  CorrectorState out;
  out.u_cor = s * forcing.k4;
  out.u_cor.axpy(-c1, g);
  out.grad_phi_cor = c1 * forcing.k4;
  out.grad_phi_cor.axpy(s, g);
  out.theta_cor = tau * forcing.k5;
  return out;
}

SpectralScalar corrector_density(const CorrectorState& cor) { return -divergence(cor.grad_phi_cor); }

SpectralScalar corrector_potential(const CorrectorState& cor) { return gradient_potential(cor.grad_phi_cor); }

NSPState assemble_ansatz(double lambda, const LimitState& limit, const OscillationFields& osc,
                         const CorrectorState* corrector) {
  NSPState out;
  out.rho = lambda * osc.rho_osc;
  out.rho[0] += 1.0;
  out.u = limit.v + osc.u_osc;
  out.theta = limit.theta;
  out.phi = osc.phi_osc;
  if (corrector != nullptr) {
    const double l2 = lambda * lambda;
    out.rho.axpy(l2, laplacian(limit.pi));
    out.rho.axpy(l2, corrector_density(*corrector));
    out.u.axpy(lambda, corrector->u_cor);
    out.theta.axpy(lambda, corrector->theta_cor);
    out.phi.axpy(lambda, limit.pi);
    out.phi.axpy(lambda, corrector_potential(*corrector));
  }
  return out;
}

}  // namespace qnl
