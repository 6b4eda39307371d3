#include "qnl/harness.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "qnl/error.hpp"
#include "qnl/projections.hpp"
#include "qnl/snapshot.hpp"

namespace qnl {

namespace {

SpectralScalar random_low_mode_field(const TorusGrid& grid, std::mt19937_64& rng, int kmax) {
  std::normal_distribution<double> normal;
  std::vector<double> samples(grid.size(), 0.0);
  // Sum of a few real Fourier modes sampled on the grid, so the field stays band-limited.
  const int dims = grid.dims();
  std::vector<std::array<int, 3>> modes;
  for (int a = -kmax; a <= kmax; ++a)
    for (int b = -kmax; b <= kmax; ++b)
      for (int c = (dims == 3 ? -kmax : 0); c <= (dims == 3 ? kmax : 0); ++c)
        if (a != 0 || b != 0 || c != 0) modes.push_back({a, b, c});
  for (const auto& k : modes) {
    const double amp = normal(rng) / static_cast<double>(modes.size());
    const double phase = 2.0 * std::acos(-1.0) * std::uniform_real_distribution<double>()(rng);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto x = grid.point(i);
      samples[i] += amp * std::cos(k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + phase);
    }
  }
  return transform_forward(grid, samples);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

double sup_or(double current, double value) { return std::max(current, value); }

}  // namespace

BaseFields default_base_fields(const TorusGrid& grid, const InitialDataSpec& ic, std::uint64_t seed) {
  const bool three = grid.dims() == 3;
  BaseFields base;
  std::vector<SpectralScalar> v;
  v.push_back(sample(grid, [&](const auto& x) {
    return std::sin(x[0]) * std::cos(x[1]) * (three ? std::cos(x[2]) : 1.0);
  }));
  v.push_back(sample(grid, [&](const auto& x) {
    return -std::cos(x[0]) * std::sin(x[1]) * (three ? std::cos(x[2]) : 1.0);
  }));
  if (three) v.push_back(SpectralScalar(grid));
  base.v0 = SpectralVector(std::move(v));
  base.theta0 = sample(grid, [](const auto& x) { return 2.0 + 0.5 * std::sin(x[0]) * std::sin(x[1]); });
  base.qu0 = gradient(sample(grid, [&](const auto& x) { return ic.q_amplitude * std::cos(x[1]); }));
  base.phi0 = sample(grid, [&](const auto& x) { return ic.phi_amplitude * std::sin(x[0]); });

  if (ic.noise > 0.0) {
    std::mt19937_64 rng(seed);
    SpectralVector w(grid);
    for (auto& c : w) c = random_low_mode_field(grid, rng, 2);
    base.v0.axpy(ic.noise, leray_p(w));
    base.theta0.axpy(ic.noise, random_low_mode_field(grid, rng, 2));
  }
  return base;
}

GradientPair initial_pair(InitialKind kind, const BaseFields& base) {
  if (kind == InitialKind::Well) {
    const auto& grid = base.v0.grid();
    return {SpectralVector(grid), SpectralVector(grid)};
  }
  return {leray_q(base.qu0), gradient(base.phi0)};
}

NSPState gen_initial_data(InitialKind kind, double lambda, const BaseFields& base) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidLambda, "lambda must be positive");
  if (max_abs_coeff(divergence(base.v0)) > kDivergenceTol)
    throw Error(ErrorCode::NotDivergenceFree, "v0 is not divergence-free");
  if (!(min_value(base.theta0) > 0.0))
    throw Error(ErrorCode::NonpositiveTemperature, "theta0 must be positive");

  NSPState s;
  s.u = base.v0;
  s.theta = base.theta0;
  if (kind == InitialKind::Well) {
    s.rho = SpectralScalar::constant(base.v0.grid(), 1.0);
    s.phi = SpectralScalar(base.v0.grid());
    return s;
  }
  GradientPair pair{base.qu0, gradient(base.phi0)};
  require_gradient_pair(pair);
  s.u += base.qu0;
  s.phi = base.phi0;
  s.phi[0] = 0.0;
  s.rho = -lambda * laplacian(s.phi);
  s.rho[0] = 1.0;
  const double rmin = min_value(s.rho);
  if (!(rmin > 0.0))
    throw Error(ErrorCode::DensityNotPositive,
                "min rho0 = " + std::to_string(rmin) + " at lambda = " + std::to_string(lambda));
  return s;
}

ErrorRow measure_errors(const NSPTrajectory& nsp, const LimitTrajectory& limit, const OscTrajectory& osc,
                        double lambda, double s, const MeasureOptions& options) {
  const auto& times = limit.snapshot_times();
  if (nsp.times.size() != times.size())
    throw Error(ErrorCode::TimeGridMismatch, "snapshot counts differ");
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(nsp.times[i] - times[i]) > 1e-12 * std::max(1.0, times.back()))
      throw Error(ErrorCode::TimeGridMismatch, "snapshot times differ at index " + std::to_string(i));

  ErrorRow row;
  row.lambda = lambda;
  row.steps = nsp.steps;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const auto& state = nsp.snapshots[i];
    const auto lim = limit.at(t);
    const auto fields = build_oscillation(t, lambda, osc.at(t));

    NSPState reference;
    if (options.correctors) {
      const auto forcing = corrector_forcing(lim, fields, options.corrector_params);
      const auto cor = solve_corrector(forcing, t / lambda);
      reference = assemble_ansatz(lambda, lim, fields, &cor);
    } else {
      reference = assemble_ansatz(lambda, lim, fields);
      if (!options.subtract_osc) reference.u = lim.v;
    }

    auto excess = state.rho;
    excess[0] -= 1.0;
    row.e_rho = sup_or(row.e_rho, sobolev_norm(excess, s));
    row.e_u = sup_or(row.e_u, sobolev_norm(state.u - reference.u, s));
    row.e_theta = sup_or(row.e_theta, sobolev_norm(state.theta - reference.theta, s));
    row.e_phi = sup_or(row.e_phi, sobolev_norm(gradient(state.phi - reference.phi), s + 1.0));

    const double bound = std::sqrt(std::pow(sobolev_norm(state.rho, s), 2) +
                                   std::pow(sobolev_norm(state.u, s), 2) +
                                   std::pow(sobolev_norm(state.theta, s), 2)) +
                         sobolev_norm(gradient(state.phi), s + 1.0);
    row.state_bound = sup_or(row.state_bound, bound);
  }
  return row;
}

RateFit fit_slope(std::string channel, std::span<const double> lambdas, std::span<const double> errors) {
  const std::size_t n = lambdas.size();
  if (n < 3 || errors.size() != n)
    throw Error(ErrorCode::InsufficientData, "need at least three points for " + channel);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lambdas[i] > 0.0) || !(errors[i] > 0.0))
      throw Error(ErrorCode::InsufficientData, "non-positive value in " + channel);
    x[i] = std::log(lambdas[i]);
    y[i] = std::log(errors[i]);
  }
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xm += x[i] / n;
    ym += y[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InsufficientData, "lambda values coincide");
  const double slope = sxy / sxx;
  const double intercept = ym - slope * xm;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ssr += r * r;
  }
  const double dof = static_cast<double>(n - 2);
  const double se = std::sqrt(ssr / dof / sxx);
  const boost::math::students_t dist(dof);
  const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
  return {std::move(channel), slope, tq * se};
}

std::vector<RateFit> fit_rate(std::span<const ErrorRow> rows) {
  std::vector<const ErrorRow*> good;
  for (const auto& r : rows)
    if (r.ok()) good.push_back(&r);
  if (good.size() < 3)
    throw Error(ErrorCode::InsufficientData,
                std::to_string(good.size()) + " successful rows, need at least three");
  std::vector<double> lambdas;
  for (const auto* r : good) lambdas.push_back(r->lambda);
  auto channel = [&](const char* name, double ErrorRow::*field) {
    std::vector<double> e;
    for (const auto* r : good) e.push_back(r->*field);
    return fit_slope(name, lambdas, e);
  };
  return {channel("E_rho", &ErrorRow::e_rho), channel("E_u", &ErrorRow::e_u),
          channel("E_theta", &ErrorRow::e_theta), channel("E_phi", &ErrorRow::e_phi)};
}

bool ConvergenceReport::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const ErrorRow& r) { return r.ok(); });
}

ConvergenceReport run_sweep(const RunConfig& config) {
  validate(config);
  const auto grid = make_grid(config.dims, config.resolution);
  const auto base = default_base_fields(grid, config.ic, config.seed);
  const auto times = config.resolved_snapshot_times();
  const auto policy = config.dt_policy();
  const auto limit_params = config.limit_params();

  const LimitState limit_initial{base.v0, base.theta0, SpectralScalar(grid)};
  const auto limit = run_limit(limit_initial, limit_params, config.t_end, policy, times);
  const auto pair0 = initial_pair(config.ic.kind, base);
  const auto osc = solve_osc(pair0, limit, limit_params, policy);

  ConvergenceReport report;
  report.osc_growth = osc.growth(config.s_norm);
  report.osc_norm_initial = sobolev_norm(pair0, config.s_norm);

  std::vector<double> lambdas = config.lambda_list;
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
  report.rows.resize(lambdas.size());
  report.diagnostics.resize(lambdas.size());

  NSPDtPolicy nsp_policy{policy, config.phase_steps};
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < lambdas.size(); i = next++) {
      const double lambda = lambdas[i];
      try {
        const auto initial = gen_initial_data(config.ic.kind, lambda, base);
        const auto traj = run_nsp(initial, config.nsp_params(lambda), lambda, config.t_end, nsp_policy, times);
        MeasureOptions options;
        options.correctors = config.correctors;
        options.corrector_params = limit_params;
        report.rows[i] = measure_errors(traj, limit, osc, lambda, config.s_norm, options);
        report.diagnostics[i] = traj.diagnostics;
        if (config.write_snapshots) {
          const auto dir = config.output_dir / "snapshots";
          std::filesystem::create_directories(dir);
          for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
            const std::string stem = "lambda" + std::to_string(i) + "_t" + std::to_string(j);
            write_snapshot(dir / (stem + "_rho.qnl"), traj.snapshots[j].rho);
            write_snapshot(dir / (stem + "_u.qnl"), traj.snapshots[j].u);
            write_snapshot(dir / (stem + "_theta.qnl"), traj.snapshots[j].theta);
            write_snapshot(dir / (stem + "_phi.qnl"), traj.snapshots[j].phi);
          }
        }
      } catch (const Error& e) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        report.rows[i] = {lambda, nan, nan, nan, nan, "failed:" + std::string(to_string(e.code())), nan, 0};
      }
    }
  };
  const int nworkers = std::min<int>(config.workers, static_cast<int>(lambdas.size()));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < nworkers; ++w) pool.emplace_back(worker);
    worker();
  }

  try {
    report.rates = fit_rate(report.rows);
  } catch (const Error& e) {
    report.rate_status = "failed:" + std::string(to_string(e.code()));
  }
  return report;
}

std::string report_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "lambda,E_rho,E_u,E_theta,E_phi,status\n";
  for (const auto& r : report.rows)
    out << fmt(r.lambda) << ',' << fmt(r.e_rho) << ',' << fmt(r.e_u) << ',' << fmt(r.e_theta) << ','
        << fmt(r.e_phi) << ',' << r.status << '\n';
  return out.str();
}

std::string rates_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "channel,slope,halfwidth\n";
  for (const auto& r : report.rates) out << r.channel << ',' << fmt(r.slope) << ',' << fmt(r.halfwidth) << '\n';
  return out.str();
}

void write_report(const ConvergenceReport& report, const RunConfig& config, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir / name).string());
    out << text;
  };
  write("report.csv", report_csv(report));
  write("rates.csv", rates_csv(report));

  std::ostringstream meta;
  meta << echo_config(config);
  meta << "# osc_growth = " << fmt(report.osc_growth) << '\n';
  meta << "# rate_status = " << report.rate_status << '\n';
  write("meta.txt", meta.str());

  std::ostringstream bounds;
  bounds << "lambda,sup_state_norm,steps\n";
  for (const auto& r : report.rows) bounds << fmt(r.lambda) << ',' << fmt(r.state_bound) << ',' << r.steps << '\n';
  write("bounds.csv", bounds.str());

  for (std::size_t i = 0; i < report.diagnostics.size(); ++i) {
    std::ostringstream diag;
    diag << diagnostics_csv_header() << '\n';
    for (const auto& d : report.diagnostics[i]) diag << diagnostics_csv_row(d) << '\n';
    write("diagnostics_" + std::to_string(i) + ".csv", diag.str());
  }
}

}  // namespace qnl
