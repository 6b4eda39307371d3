#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "qnl/error.hpp"
#include "qnl/harness.hpp"
#include "support.hpp"

using namespace qnl;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::vector<ErrorRow> synthetic_rows(const std::function<double(double)>& e) {
  std::vector<ErrorRow> rows;
  for (double l : {0.1, 0.05, 0.025, 0.0125}) {
    ErrorRow r;
    r.lambda = l;
    r.e_rho = r.e_u = r.e_theta = r.e_phi = e(l);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse(
      "# comment\n"
      "dims = 2\n"
      "resolution = 32\n"
      "lambda_list = 0.2, 0.1, 0.05\n"
      "mu = 0.1\n"
      "\n"
      "ic = well\n"
      "snapshot_times = 0.5, 0.25\n"
      "t_end = 0.5\n");
  CHECK(c.resolution == 32);
  CHECK(c.lambda_list == std::vector<double>{0.2, 0.1, 0.05});
  CHECK(c.params.mu == 0.1);
  CHECK(c.ic.kind == InitialKind::Well);
  CHECK(c.resolved_snapshot_times() == std::vector<double>{0.0, 0.25, 0.5});
  CHECK(RunConfig{}.resolved_snapshot_times().size() == 17u);

  // the echo parses back to the same configuration
  const auto again = parse(echo_config(c));
  CHECK(echo_config(again) == echo_config(c));

  CHECK(code_of([] { parse("colour = blue\n"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse("lambda_list =\n"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse("lambda_list = 0.1, 0.2\n"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse("lambda_list = 0.1, -0.2\n"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse("s_norm = 2.5\n"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse("resolution = 33\n"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse("mu = abc\n"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse("just words\n"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse("coupled_dissipation = 0.2\n"); }) == ErrorCode::InvalidConfig);
  // the flag overrides any dissipation given alongside it
  const auto forced = parse("mu = 0.3\neuler_mode = true\nkappa = 0.1\n");
  CHECK(forced.params.inviscid());
  CHECK(echo_config(forced).find("mu = 0\n") != std::string::npos);

  const auto e = parse("euler_mode = true\nmu = 0\nkappa = 0\ncoupled_dissipation = 0.2\n");
  CHECK(e.limit_params().inviscid());
  CHECK(e.nsp_params(0.05).mu == doctest::Approx(0.01));
  CHECK(e.nsp_params(0.05).kappa == doctest::Approx(0.01));

  RunConfig empty;
  empty.lambda_list.clear();
  CHECK(code_of([&] { run_sweep(empty); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("initial data") {
  const auto g = make_grid(2, 32);
  const auto base = default_base_fields(g, InitialDataSpec{}, 0);
  CHECK(max_abs_coeff(divergence(base.v0)) < 1e-15);
  CHECK(min_value(base.theta0) > 0.0);

  const auto well = gen_initial_data(InitialKind::Well, 0.1, base);
  CHECK(max_abs_coeff(well.rho - SpectralScalar::constant(g, 1.0)) == 0.0);
  CHECK(max_abs_coeff(well.u - base.v0) == 0.0);
  CHECK(max_abs_coeff(well.theta - base.theta0) == 0.0);
  CHECK(max_abs_coeff(well.phi) == 0.0);

  const auto ill = gen_initial_data(InitialKind::Ill, 0.1, base);
  const auto expect = sample(g, [](const auto& x) { return 1.0 + 0.03 * std::sin(x[0]); });
  CHECK(max_abs_coeff(ill.rho - expect) < 1e-15);
  auto defect = ill.rho + 0.1 * laplacian(base.phi0);
  defect[0] -= 1.0;
  CHECK(sobolev_norm(defect, 3) == 0.0);
  CHECK(max_abs_coeff(ill.u - base.v0 - base.qu0) == 0.0);
  // projecting back recovers the pieces up to round-off
  CHECK(sobolev_norm(leray_p(ill.u) - base.v0, 3) < 1e-12);
  CHECK(sobolev_norm(leray_q(ill.u) - base.qu0, 3) < 1e-12);

  CHECK(code_of([&] { gen_initial_data(InitialKind::Ill, 5.0, base); }) == ErrorCode::DensityNotPositive);
  auto bad = base;
  bad.v0 += base.qu0;
  CHECK(code_of([&] { gen_initial_data(InitialKind::Ill, 0.1, bad); }) == ErrorCode::NotDivergenceFree);

  // seeded perturbation is reproducible and stays admissible
  InitialDataSpec noisy;
  noisy.noise = 0.1;
  const auto a = default_base_fields(g, noisy, 7);
  const auto b = default_base_fields(g, noisy, 7);
  const auto c = default_base_fields(g, noisy, 8);
  CHECK(max_abs_coeff(a.v0 - b.v0) == 0.0);
  CHECK(max_abs_coeff(a.v0 - c.v0) > 0.0);
  CHECK(max_abs_coeff(divergence(a.v0)) < 1e-12);
}

TEST_CASE("rate fitting") {
  auto close = [](double a, double b, double tol) { return std::abs(a - b) <= tol; };
  for (const auto& fit : fit_rate(synthetic_rows([](double l) { return 2.0 * l; }))) {
    CHECK(close(fit.slope, 1.0, 1e-12));
    CHECK(fit.halfwidth < 1e-10);
  }
  for (const auto& fit : fit_rate(synthetic_rows([](double l) { return 3.0 * l * l; }))) {
    CHECK(close(fit.slope, 2.0, 1e-12));
    CHECK(fit.halfwidth < 1e-10);
  }

  std::mt19937_64 rng(61);
  std::normal_distribution<double> normal;
  std::vector<double> lambdas, errors, xs, ys;
  for (double l = 0.2; l > 0.005; l *= 0.7) {
    const double e = l * (1.0 + 0.05 * normal(rng));
    lambdas.push_back(l);
    errors.push_back(e);
    xs.push_back(std::log(l));
    ys.push_back(std::log(e));
  }
  const auto fit = fit_slope("E_u", lambdas, errors);
  CHECK(fit.slope >= 0.9);
  CHECK(fit.slope <= 1.1);
  CHECK(std::abs(fit.slope - oracle::normal_equations_fit(xs, ys).slope) <= 1e-12);
  CHECK(fit.halfwidth > 0.0);

  auto rows = synthetic_rows([](double l) { return l; });
  rows[1].status = "failed:BlowUp";
  rows[2].status = "failed:BlowUp";
  CHECK(code_of([&] { fit_rate(rows); }) == ErrorCode::InsufficientData);
  rows[2].status = "ok";
  CHECK(fit_rate(rows).size() == 4u);
}

TEST_CASE("error measurement") {
  const auto g = make_grid(2, 16);
  const PhysParams p{0.05, 0.0, 0.05};
  const auto base = default_base_fields(g, InitialDataSpec{}, 0);
  const auto times = evenly_spaced_times(0.2, 5);
  const auto limit = run_limit({base.v0, base.theta0, SpectralScalar(g)}, p, 0.2, DtPolicy{}, times);
  const auto osc = solve_osc(initial_pair(InitialKind::Ill, base), limit, p, DtPolicy{});
  const double lambda = 0.05, s = 3.0;

  // the expansion itself as a trajectory: zero error
  NSPTrajectory exact;
  exact.times = times;
  for (double t : times) exact.snapshots.push_back(assemble_ansatz(lambda, limit.at(t), build_oscillation(t, lambda, osc.at(t))));
  const auto row = measure_errors(exact, limit, osc, lambda, s);
  CHECK(row.e_u == 0.0);
  CHECK(row.e_theta == 0.0);
  CHECK(row.e_phi == 0.0);
  CHECK(row.ok());

  // theta shifted by lambda sin x1 at every snapshot
  auto shifted = exact;
  const auto bump = sample(g, [](const auto& x) { return std::sin(x[0]); });
  for (auto& snap : shifted.snapshots) snap.theta.axpy(lambda, bump);
  const auto r2 = measure_errors(shifted, limit, osc, lambda, s);
  CHECK(std::abs(r2.e_theta - lambda * sobolev_norm(bump, s)) < 1e-15);
  CHECK(r2.e_u == 0.0);

  auto wrong = exact;
  wrong.times.back() += 0.01;
  CHECK(code_of([&] { measure_errors(wrong, limit, osc, lambda, s); }) == ErrorCode::TimeGridMismatch);
  wrong.times.pop_back();
  CHECK(code_of([&] { measure_errors(wrong, limit, osc, lambda, s); }) == ErrorCode::TimeGridMismatch);
}

TEST_CASE("small sweep") {
  RunConfig c;
  c.resolution = 16;
  c.t_end = 0.1;
  c.snapshot_count = 3;
  c.lambda_list = {0.1, 0.05, 0.025};
  c.workers = 2;
  const auto rep = run_sweep(c);
  REQUIRE(rep.rows.size() == 3u);
  CHECK(rep.all_ok());
  CHECK(rep.rows[0].lambda == 0.1);
  CHECK(rep.rows[2].lambda == 0.025);
  CHECK(rep.rates.size() == 4u);
  CHECK(report_csv(rep).rfind("lambda,E_rho,E_u,E_theta,E_phi,status\n", 0) == 0);
  CHECK(rates_csv(rep).rfind("channel,slope,halfwidth\n", 0) == 0);

  // same config on one worker gives the same bytes
  c.workers = 1;
  CHECK(report_csv(run_sweep(c)) == report_csv(rep));

  // an inadmissible lambda is a failed row, not a failed sweep
  c.lambda_list = {5.0, 0.1, 0.05, 0.025};
  const auto mixed = run_sweep(c);
  CHECK(!mixed.all_ok());
  CHECK(mixed.rows[0].status == "failed:DensityNotPositive");
  CHECK(mixed.rates.size() == 4u);
  CHECK(report_csv(mixed).find("nan,nan,nan,nan,failed:DensityNotPositive") != std::string::npos);
}
