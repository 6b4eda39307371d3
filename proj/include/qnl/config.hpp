#pragma once

// Run configuration: a line-oriented `key = value` file. Blank lines and
// lines starting with '#' are ignored; unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qnl/limit_solver.hpp"

namespace qnl {

enum class InitialKind { Well, Ill };

struct InitialDataSpec {
  InitialKind kind = InitialKind::Ill;
  double q_amplitude = 0.4;    // Q u0 = grad(q_amplitude cos x2)
  double phi_amplitude = 0.3;  // phi0 = phi_amplitude sin x1
  double noise = 0.0;          // amplitude of a seeded low-mode perturbation of v0 and theta0
};

struct RunConfig {
  int dims = 2;
  int resolution = 64;
  double s_norm = 3.0;
  std::vector<double> lambda_list{0.1, 0.05, 0.025, 0.0125};
  PhysParams params{0.05, 0.0, 0.05};
  bool euler_mode = false;  // zeroes mu, nu, kappa when parsed
  // Euler mode only: the compressible runs use mu = nu = kappa = c * lambda.
  double coupled_dissipation = 0.0;
  double t_end = 0.5;
  int snapshot_count = 17;
  std::vector<double> snapshot_times;  // overrides snapshot_count when non-empty
  InitialDataSpec ic;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "qnl_out";
  int workers = 1;
  double cfl = 0.5;
  double dt_max = 0.05;
  double phase_steps = 16.0;
  bool correctors = false;
  bool write_snapshots = false;

  // Parameters of the limit and oscillation systems.
  PhysParams limit_params() const;
  // Parameters of the compressible run at a given lambda.
  PhysParams nsp_params(double lambda) const;
  std::vector<double> resolved_snapshot_times() const;
  DtPolicy dt_policy() const;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);
// Throws InvalidConfig on any violated invariant.
void validate(const RunConfig& config);
// The resolved configuration in the same key = value syntax.
std::string echo_config(const RunConfig& config);

}  // namespace qnl
