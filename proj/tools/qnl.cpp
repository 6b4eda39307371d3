#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "qnl/config.hpp"
#include "qnl/error.hpp"
#include "qnl/harness.hpp"
#include "qnl/projections.hpp"

namespace {

using namespace qnl;

int cmd_run(const std::string& path, const std::string& out_override) {
  auto config = load_config(path);
  if (!out_override.empty()) config.output_dir = out_override;
  const auto report = run_sweep(config);
  write_report(report, config, config.output_dir);
  std::cout << report_csv(report);
  if (report.rate_status == "ok")
    std::cout << rates_csv(report);
  else
    std::cout << "rates: " << report.rate_status << '\n';
  return report.all_ok() ? 0 : 1;
}

int cmd_limit(const std::string& path, const std::string& out_override) {
  auto config = load_config(path);
  if (!out_override.empty()) config.output_dir = out_override;
  const auto grid = make_grid(config.dims, config.resolution);
  const auto base = default_base_fields(grid, config.ic, config.seed);
  const auto times = config.resolved_snapshot_times();
  const auto limit = run_limit({base.v0, base.theta0, SpectralScalar(grid)}, config.limit_params(),
                               config.t_end, config.dt_policy(), times);

  std::filesystem::create_directories(config.output_dir);
  std::ofstream out(config.output_dir / "limit.csv");
  if (!out) throw Error(ErrorCode::Io, "cannot write limit.csv");
  out << "t,norm_v,norm_theta,norm_pi,kinetic\n";
  std::cout << "t,norm_v,norm_theta,norm_pi,kinetic\n";
  for (double t : times) {
    const auto st = limit.at(t);
    char line[256];
    std::snprintf(line, sizeof line, "%.10e,%.10e,%.10e,%.10e,%.10e\n", t, sobolev_norm(st.v, config.s_norm),
                  sobolev_norm(st.theta, config.s_norm), sobolev_norm(st.pi, config.s_norm),
                  0.5 * std::pow(sobolev_norm(st.v, 0.0), 2));
    out << line;
    std::cout << line;
  }
  std::ofstream meta(config.output_dir / "meta.txt");
  meta << echo_config(config);
  return 0;
}

// quick invariant suite on small grids

SpectralScalar random_field(const TorusGrid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> x(grid.size());
  for (auto& v : x) v = normal(rng);
  return transform_forward(grid, x);
}

SpectralVector random_vector(const TorusGrid& grid, std::mt19937_64& rng) {
  SpectralVector w(grid);
  for (auto& c : w) c = random_field(grid, rng);
  return w;
}

struct Check {
  std::string name;
  double value;
  double tol;
};

int cmd_check() {
  std::mt19937_64 rng(12345);
  std::vector<Check> checks;
  const auto grid = make_grid(2, 16);

  double q_idem = 0.0, pq = 0.0, orth = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto w = random_vector(grid, rng);
    const auto q = leray_q(w);
    const double n = sobolev_norm(w, 2.0);
    q_idem = std::max(q_idem, sobolev_norm(leray_q(q) - q, 2.0) / n);
    pq = std::max(pq, sobolev_norm(leray_p(q), 2.0) / n);
    auto weight = [](const SpectralVector& f) {
      SpectralVector out = f;
      for (auto& c : out) c = scale_modes(c, [](const std::array<int, 3>&, double k2) { return 1.0 + k2; });
      return out;
    };
    orth = std::max(orth, std::abs(inner(weight(leray_p(w)), q)) / (n * n));
  }
  checks.push_back({"projection Q^2 = Q", q_idem, 1e-12});
  checks.push_back({"projection PQ = 0", pq, 1e-12});
  checks.push_back({"projection orthogonality", orth, 1e-12});

  double iso = 0.0, law = 0.0;
  for (int i = 0; i < 20; ++i) {
    const GradientPair pair{leray_q(random_vector(grid, rng)), leray_q(random_vector(grid, rng))};
    const double t1 = 3.0 * std::normal_distribution<double>()(rng);
    const double t2 = 3.0 * std::normal_distribution<double>()(rng);
    for (int s = 0; s <= 3; ++s)
      iso = std::max(iso, std::abs(sobolev_norm(apply_group(t1, pair), s) / sobolev_norm(pair, s) - 1.0));
    auto a = apply_group(t1 + t2, pair);
    const auto b = apply_group(t1, apply_group(t2, pair));
    a.axpy(-1.0, b);
    law = std::max(law, sobolev_norm(a, 3.0) / sobolev_norm(pair, 3.0));
  }
  checks.push_back({"group isometry", iso, 1e-12});
  checks.push_back({"group law", law, 1e-12});

  {
    RunConfig cfg;
    cfg.resolution = 16;
    const double lambda = 0.05;
    const auto base = default_base_fields(grid, cfg.ic, 0);
    const auto init = gen_initial_data(InitialKind::Ill, lambda, base);
    const auto traj = run_nsp(init, cfg.params, lambda, 0.1, NSPDtPolicy{}, evenly_spaced_times(0.1, 5));
    double drift = 0.0, residual = 0.0;
    for (const auto& d : traj.diagnostics) {
      drift = std::max(drift, std::abs(d.mass / traj.diagnostics.front().mass - 1.0));
      residual = std::max(residual, d.poisson_residual);
    }
    checks.push_back({"mass drift", drift, 1e-10});
    checks.push_back({"poisson residual", residual, 1e-10});
  }

  bool all = true;
  for (const auto& c : checks) {
    const bool ok = c.value <= c.tol;
    all = all && ok;
    std::printf("%s %-28s %.3e (tol %.0e)\n", ok ? "PASS" : "FAIL", c.name.c_str(), c.value, c.tol);
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasineutral limit sweeps for Navier-Stokes-Poisson on the torus"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* run = app.add_subcommand("run", "full lambda sweep");
  run->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--output", out_dir, "override output_dir");
  auto* limit = app.add_subcommand("limit", "limit solve only");
  limit->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  limit->add_option("--output", out_dir, "override output_dir");
  auto* check = app.add_subcommand("check", "invariant suite");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(config_path, out_dir);
    if (limit->parsed()) return cmd_limit(config_path, out_dir);
    if (check->parsed()) return cmd_check();
  } catch (const Error& e) {
    std::cerr << "qnl: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 2;
  }
  return 0;
}
