#include "qnl/nsp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "qnl/error.hpp"
#include "qnl/projections.hpp"

namespace qnl {

namespace {

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw Error(ErrorCode::InvalidLambda, "lambda must be positive");
}

// exp(h M) for M = [[-d, -w], [w, 0]], written as
// exp(-d h / 2) (C I + S (M + d/2 I)) with (M + d/2 I)^2 = (d^2/4 - w^2) I.
struct Rotation2 {
  double m00, m01, m10, m11;
};

Rotation2 damped_rotation(double d, double w, double h) {
  const double a0 = -0.5 * d;
  const double delta = 0.25 * d * d - w * w;
  const double x = delta * h * h;
  double ec = 0.0;  // exp(a0 h) C
  double es = 0.0;  // exp(a0 h) S
  if (std::abs(x) < 1e-6) {
    const double e = std::exp(a0 * h);
    ec = e * (1.0 + x / 2.0 + x * x / 24.0);
    es = e * h * (1.0 + x / 6.0 + x * x / 120.0);
  } else if (delta > 0.0) {
    const double r = std::sqrt(delta);
    const double plus = -w * w / (r - a0);  // a0 + r without cancellation
    const double minus = a0 - r;
    const double ep = std::exp(plus * h);
    const double em = std::exp(minus * h);
    ec = 0.5 * (ep + em);
    es = (ep - em) / (2.0 * r);
  } else {
    const double r = std::sqrt(-delta);
    const double e = std::exp(a0 * h);
    ec = e * std::cos(r * h);
    es = e * std::sin(r * h) / r;
  }
  return {ec - 0.5 * d * es, -w * es, w * es, ec + 0.5 * d * es};
}

// Internal stepping variables; rho is a function of phi.
struct Vars {
  SpectralVector u;
  SpectralScalar phi;
  SpectralScalar theta;

  Vars& axpy(double a, const Vars& o) {
    u.axpy(a, o.u);
    phi.axpy(a, o.phi);
    theta.axpy(a, o.theta);
    return *this;
  }
  Vars& operator*=(double a) {
    u *= a;
    phi *= a;
    theta *= a;
    return *this;
  }
};

SpectralScalar density_from_potential(const SpectralScalar& phi, double lambda) {
  auto rho = -lambda * laplacian(phi);
  rho[0] += 1.0;
  return rho;
}

Vars propagate(const Vars& y, const PhysParams& params, double lambda, double h) {
  const auto& grid = y.phi.grid();
  const int dims = grid.dims();
  const double w = 1.0 / lambda;
  Vars out = y;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = grid.unravel(i);
    std::array<double, 3> k{0.0, 0.0, 0.0};
    double keff2 = 0.0;
    for (int a = 0; a < dims; ++a) {
      k[a] = grid.is_nyquist(idx[a]) ? 0.0 : grid.wavenumber(idx[a]);
      keff2 += k[a] * k[a];
    }
    const double k2 = grid.wavenumber_sq(i);
    const double shear = std::exp(-params.mu * k2 * h);
    out.theta[i] = std::exp(-params.kappa * k2 * h) * y.theta[i];
    if (keff2 == 0.0) {
      for (int a = 0; a < dims; ++a) out.u[a][i] = shear * y.u[a][i];
      continue;
    }
    const double kn = std::sqrt(keff2);
    Complex amp = 0.0;  // Q u = khat * amp
    for (int a = 0; a < dims; ++a) amp += k[a] / kn * y.u[a][i];
    const Complex field = Complex(0.0, kn) * y.phi[i];  // grad phi = khat * field
    const auto r = damped_rotation(params.mu * k2 + (params.mu + params.nu) * keff2, w, h);
    const Complex amp_new = r.m00 * amp + r.m01 * field;
    const Complex field_new = r.m10 * amp + r.m11 * field;
    for (int a = 0; a < dims; ++a) {
      const Complex perp = y.u[a][i] - k[a] / kn * amp;
      out.u[a][i] = shear * perp + k[a] / kn * amp_new;
    }
    out.phi[i] = field_new / Complex(0.0, kn);
  }
  return out;
}

void check_positivity(const SpectralScalar& rho, const SpectralScalar& theta) {
  const double rmin = min_value(rho);
  if (!(rmin > kRhoFloor))
    throw Error(ErrorCode::DegenerateDensity, "min rho = " + std::to_string(rmin));
  const double tmin = min_value(theta);
  if (!(tmin > 0.0))
    throw Error(ErrorCode::NonpositiveTemperature, "min theta = " + std::to_string(tmin));
}

NSPTendency nonstiff(const SpectralScalar& rho, const SpectralVector& u, const SpectralScalar& theta,
                     const SpectralScalar& phi, const PhysParams& params, double lambda) {
  if (!(min_value(rho) > kRhoFloor))
    throw Error(ErrorCode::DegenerateDensity, "min rho = " + std::to_string(min_value(rho)));

  const auto div_u = divergence(u);
  const auto inv_rho_minus_one = map_pointwise(rho, [](double r) { return 1.0 / r - 1.0; });
  const auto inv_rho = map_pointwise(rho, [](double r) { return 1.0 / r; });
  const auto log_rho = map_pointwise(rho, [](double r) { return std::log(r); });

  NSPTendency rate;

  // grad(rho theta) / rho = grad theta + theta grad log rho
  rate.u = -advect(u, u);
  rate.u -= gradient(theta);
  rate.u -= scale(theta, gradient(log_rho));
  auto viscous = params.mu * laplacian(u);
  viscous.axpy(params.mu + params.nu, gradient(div_u));
  rate.u += scale(inv_rho_minus_one, viscous);

  // rho - 1 = -lambda lap phi, so div((rho - 1) u) / lambda = -div(u lap phi).
  const auto charge_flux = scale(laplacian(phi), u);
  rate.phi = -inverse_laplacian(divergence(charge_flux));
  rate.rho = lambda * divergence(charge_flux);

  rate.theta = -advect(u, theta);
  rate.theta -= product(theta, div_u);
  rate.theta += product(inv_rho_minus_one, params.kappa * laplacian(theta));
  auto heating = viscous_heating(u, params.mu);
  heating.axpy(params.nu, product(div_u, div_u));
  rate.theta += product(inv_rho, heating);
  return rate;
}

}  // namespace

SpectralScalar poisson_solve(const SpectralScalar& rho, double lambda, double mean_tol) {
  require_lambda(lambda);
  if (std::abs(rho.mean() - 1.0) > mean_tol)
    throw Error(ErrorCode::MassDefect,
                "mean density " + std::to_string(rho.mean().real()) + " differs from 1");
  auto excess = rho;
  excess[0] = 0.0;
  return (-1.0 / lambda) * inverse_laplacian(excess);
}

double poisson_residual(const NSPState& state, double lambda) {
  auto residual = -lambda * laplacian(state.phi) - state.rho;
  residual[0] += 1.0;
  return sobolev_norm(residual, 0.0);
}

NSPTendency nsp_rhs_nonstiff(const NSPState& state, const PhysParams& params, double lambda) {
  require_lambda(lambda);
  return nonstiff(state.rho, state.u, state.theta, state.phi, params, lambda);
}

NSPState nsp_linear_propagate(const NSPState& state, const PhysParams& params, double lambda, double h) {
  require_lambda(lambda);
  const auto y = propagate({state.u, state.phi, state.theta}, params, lambda, h);
  return {density_from_potential(y.phi, lambda), y.u, y.theta, y.phi};
}

NSPState nsp_step(const NSPState& state, const PhysParams& params, double lambda, double dt) {
  require_lambda(lambda);
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidTimeStep, "dt must be positive");
  const Vars y0{state.u, state.phi, state.theta};
  const auto y1 = lawson_rk4(
      y0, dt,
      [&](const Vars& y, double) {
        const auto r = nonstiff(density_from_potential(y.phi, lambda), y.u, y.theta, y.phi, params, lambda);
        return Vars{r.u, r.phi, r.theta};
      },
      [&](const Vars& y, double h) { return propagate(y, params, lambda, h); }, [](Vars&) {});

  NSPState out;
  out.rho = density_from_potential(y1.phi, lambda);
  out.phi = poisson_solve(out.rho, lambda);
  out.u = y1.u;
  out.theta = y1.theta;
  check_positivity(out.rho, out.theta);
  return out;
}

NSPDiagnostics diagnose(double t, const NSPState& state, double lambda, double s) {
  NSPDiagnostics d;
  d.t = t;
  d.mass = state.rho.mean().real();
  d.min_rho = min_value(state.rho);
  d.min_theta = min_value(state.theta);
  auto excess = state.rho;
  excess[0] -= 1.0;
  d.norm_rho = sobolev_norm(excess, s);
  d.norm_u = sobolev_norm(state.u, s);
  d.norm_theta = sobolev_norm(state.theta, s);
  d.norm_grad_phi = sobolev_norm(gradient(state.phi), s + 1.0);
  d.poisson_residual = poisson_residual(state, lambda);

  const auto rho = transform_inverse(state.rho);
  const auto theta = transform_inverse(state.theta);
  std::vector<double> kinetic(rho.size(), 0.0);
  for (const auto& c : state.u) {
    const auto uc = transform_inverse(c);
    for (std::size_t i = 0; i < uc.size(); ++i) kinetic[i] += uc[i] * uc[i];
  }
  double field = 0.0;
  for (const auto& c : gradient(state.phi)) field += inner(c, c);
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) sum += rho[i] * (0.5 * kinetic[i] + theta[i]);
  d.energy = sum / static_cast<double>(rho.size()) + 0.5 * field;
  return d;
}

double nsp_time_step(const NSPState& state, double lambda, const NSPDtPolicy& policy) {
  if (policy.base.fixed_dt > 0.0) return policy.base.fixed_dt;
  const double umax = max_abs_value(state.u);
  double dt = policy.base.dt_max;
  if (umax > 0.0) dt = std::min(dt, policy.base.cfl * state.u.grid().spacing() / umax);
  return std::min(dt, 2.0 * std::numbers::pi * lambda / policy.phase_steps);
}

NSPTrajectory run_nsp(const NSPState& initial, const PhysParams& params, double lambda, double t_end,
                      const NSPDtPolicy& policy, std::span<const double> snapshot_times) {
  require_lambda(lambda);
  const auto times = normalize_snapshot_times(snapshot_times, t_end);
  const double s = policy.base.guard_sobolev_index;
  const double limit = policy.base.guard_factor * std::max(1.0, sobolev_norm(initial.u, s));

  check_positivity(initial.rho, initial.theta);
  NSPTrajectory traj;
  NSPState state = initial;
  double t = 0.0;
  traj.times.push_back(t);
  traj.snapshots.push_back(state);
  traj.diagnostics.push_back(diagnose(t, state, lambda, s));

  for (std::size_t seg = 1; seg < times.size(); ++seg) {
    const auto plan = plan_substeps(t, times[seg], nsp_time_step(state, lambda, policy));
    for (int i = 0; i < plan.count; ++i) {
      state = nsp_step(state, params, lambda, plan.dt);
      ++traj.steps;
      t = (i + 1 == plan.count) ? times[seg] : t + plan.dt;
      if (!(sobolev_norm(state.u, s) <= limit))
        throw Error(ErrorCode::BlowUp, "velocity norm exceeded guard at t = " + std::to_string(t));
    }
    traj.times.push_back(t);
    traj.snapshots.push_back(state);
    traj.diagnostics.push_back(diagnose(t, state, lambda, s));
  }
  return traj;
}

std::string diagnostics_csv_header() {
  return "t,mass,min_rho,min_theta,norm_rho,norm_u,norm_theta,norm_grad_phi,poisson_residual,energy";
}

std::string diagnostics_csv_row(const NSPDiagnostics& d) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.10e,%.16e,%.10e,%.10e,%.10e,%.10e,%.10e,%.10e,%.10e,%.16e", d.t,
                d.mass, d.min_rho, d.min_theta, d.norm_rho, d.norm_u, d.norm_theta, d.norm_grad_phi,
                d.poisson_residual, d.energy);
  return buf;
}

}  // namespace qnl
