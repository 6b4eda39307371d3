#pragma once

// Lambda sweep: one limit solve, one oscillation solve, then per lambda a
// compressible run measured against v + u_osc, theta, grad phi_osc.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qnl/config.hpp"
#include "qnl/nsp_solver.hpp"
#include "qnl/oscillating_ansatz.hpp"

namespace qnl {

struct BaseFields {
  SpectralVector v0;     // divergence-free
  SpectralScalar theta0; // inf > 0
  SpectralVector qu0;    // gradient part of the initial velocity
  SpectralScalar phi0;   // mean-zero
};

// v0 Taylor-Green, theta0 = 2 + 0.5 sin x1 sin x2, Q u0 = grad(a cos x2), phi0 = b sin x1,
// plus an optional seeded perturbation.
BaseFields default_base_fields(const TorusGrid& grid, const InitialDataSpec& ic, std::uint64_t seed);

// rho = 1 - lambda lap phi0, u = v0 + Q u0, theta = theta0, phi = phi0.
// Well-prepared data drop Q u0 and phi0.
NSPState gen_initial_data(InitialKind kind, double lambda, const BaseFields& base);

GradientPair initial_pair(InitialKind kind, const BaseFields& base);

struct ErrorRow {
  double lambda = 0.0;
  double e_rho = 0.0;
  double e_u = 0.0;
  double e_theta = 0.0;
  double e_phi = 0.0;
  std::string status = "ok";
  double state_bound = 0.0;  // sup_t ||(rho, u, theta)||_{H^s} + ||grad phi||_{H^{s+1}}
  int steps = 0;

  bool ok() const { return status == "ok"; }
};

struct MeasureOptions {
  bool subtract_osc = true;
  bool correctors = false;
  PhysParams corrector_params;  // forcing parameters when correctors are on
};

ErrorRow measure_errors(const NSPTrajectory& nsp, const LimitTrajectory& limit, const OscTrajectory& osc,
                        double lambda, double s, const MeasureOptions& options = {});

struct RateFit {
  std::string channel;
  double slope = 0.0;
  double halfwidth = 0.0;  // 95% Student-t half-width from the residuals
};

// Least-squares slope of log(error) against log(lambda).
RateFit fit_slope(std::string channel, std::span<const double> lambdas, std::span<const double> errors);
// One fit per channel over the successful rows; InsufficientData below three.
std::vector<RateFit> fit_rate(std::span<const ErrorRow> rows);

struct ConvergenceReport {
  std::vector<ErrorRow> rows;  // lambda descending
  std::vector<RateFit> rates;  // empty when fewer than three rows succeeded
  double osc_growth = 1.0;     // observed C(T) of the oscillation system
  double osc_norm_initial = 0.0;
  std::string rate_status = "ok";
  std::vector<std::vector<NSPDiagnostics>> diagnostics;  // per row
  bool all_ok() const;
};

ConvergenceReport run_sweep(const RunConfig& config);

std::string report_csv(const ConvergenceReport& report);
std::string rates_csv(const ConvergenceReport& report);
// report.csv, rates.csv, meta.txt, bounds.csv and diagnostics_<i>.csv in `dir`.
void write_report(const ConvergenceReport& report, const RunConfig& config, const std::filesystem::path& dir);

}  // namespace qnl
