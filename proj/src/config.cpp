#include "qnl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qnl/error.hpp"

namespace qnl {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const char* what) {
  throw Error(ErrorCode::InvalidConfig, key + " = '" + value + "': " + what);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (used != value.size()) bad(key, value, "trailing characters");
    return d;
  } catch (const std::logic_error&) {
    bad(key, value, "expected a number");
  }
}

long to_int(const std::string& key, const std::string& value) {
  long out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad(key, value, "expected an integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad(key, value, "expected true or false");
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + fmt(values[i]);
  return out;
}

}  // namespace

PhysParams RunConfig::limit_params() const { return euler_mode ? PhysParams{} : params; }

PhysParams RunConfig::nsp_params(double lambda) const {
  if (!euler_mode) return params;
  const double c = coupled_dissipation * lambda;
  return {c, c, c};
}

std::vector<double> RunConfig::resolved_snapshot_times() const {
  if (!snapshot_times.empty()) return normalize_snapshot_times(snapshot_times, t_end);
  return evenly_spaced_times(t_end, snapshot_count);
}

DtPolicy RunConfig::dt_policy() const {
  DtPolicy p;
  p.cfl = cfl;
  p.dt_max = dt_max;
  p.guard_sobolev_index = s_norm;
  return p;
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(std::string_view(text).substr(0, eq));
    const auto value = trim(std::string_view(text).substr(eq + 1));

    if (key == "dims") c.dims = static_cast<int>(to_int(key, value));
    else if (key == "resolution") c.resolution = static_cast<int>(to_int(key, value));
    else if (key == "s_norm") c.s_norm = to_double(key, value);
    else if (key == "lambda_list") c.lambda_list = to_list(key, value);
    else if (key == "mu") c.params.mu = to_double(key, value);
    else if (key == "nu") c.params.nu = to_double(key, value);
    else if (key == "kappa") c.params.kappa = to_double(key, value);
    else if (key == "euler_mode") c.euler_mode = to_bool(key, value);
    else if (key == "coupled_dissipation") c.coupled_dissipation = to_double(key, value);
    else if (key == "t_end") c.t_end = to_double(key, value);
    else if (key == "snapshot_count") c.snapshot_count = static_cast<int>(to_int(key, value));
    else if (key == "snapshot_times") c.snapshot_times = to_list(key, value);
    else if (key == "ic") {
      if (value == "well") c.ic.kind = InitialKind::Well;
      else if (value == "ill") c.ic.kind = InitialKind::Ill;
      else bad(key, value, "expected well or ill");
    } else if (key == "ic_q_amplitude") c.ic.q_amplitude = to_double(key, value);
    else if (key == "ic_phi_amplitude") c.ic.phi_amplitude = to_double(key, value);
    else if (key == "ic_noise") c.ic.noise = to_double(key, value);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "workers") c.workers = static_cast<int>(to_int(key, value));
    else if (key == "cfl") c.cfl = to_double(key, value);
    else if (key == "dt_max") c.dt_max = to_double(key, value);
    else if (key == "phase_steps") c.phase_steps = to_double(key, value);
    else if (key == "correctors") c.correctors = to_bool(key, value);
    else if (key == "write_snapshots") c.write_snapshots = to_bool(key, value);
    else throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "' on line " + std::to_string(lineno));
  }
  if (c.euler_mode) c.params = {};
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  return parse_config(in);
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (c.dims != 2 && c.dims != 3) fail("dims must be 2 or 3");
  if (c.resolution < 8 || c.resolution % 2 != 0) fail("resolution must be even and >= 8");
  if (c.s_norm < c.dims / 2.0 + 2.0) fail("s_norm must be at least dims/2 + 2");
  if (c.lambda_list.empty()) fail("lambda_list is empty");
  for (std::size_t i = 0; i < c.lambda_list.size(); ++i) {
    if (!(c.lambda_list[i] > 0.0)) fail("lambda values must be positive");
    if (i > 0 && !(c.lambda_list[i] < c.lambda_list[i - 1])) fail("lambda_list must be strictly decreasing");
  }
  if (!(c.t_end > 0.0)) fail("t_end must be positive");
  if (c.snapshot_times.empty() && c.snapshot_count < 2) fail("snapshot_count must be >= 2");
  if (c.workers < 1) fail("workers must be >= 1");
  if (!(c.cfl > 0.0) || !(c.dt_max > 0.0) || !(c.phase_steps > 0.0)) fail("time-step controls must be positive");
  if (c.coupled_dissipation < 0.0) fail("coupled_dissipation must be non-negative");
  if (c.coupled_dissipation > 0.0 && !c.euler_mode) fail("coupled_dissipation requires euler_mode");
  if (c.ic.noise < 0.0) fail("ic_noise must be non-negative");
  try {
    validate(c.limit_params(), c.euler_mode ? FlowMode::Euler : FlowMode::NavierStokes, c.dims);
  } catch (const Error& e) {
    fail(e.what());
  }
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream out;
  out << "dims = " << c.dims << '\n'
      << "resolution = " << c.resolution << '\n'
      << "s_norm = " << fmt(c.s_norm) << '\n'
      << "lambda_list = " << fmt_list(c.lambda_list) << '\n'
      << "mu = " << fmt(c.params.mu) << '\n'
      << "nu = " << fmt(c.params.nu) << '\n'
      << "kappa = " << fmt(c.params.kappa) << '\n'
      << "euler_mode = " << (c.euler_mode ? "true" : "false") << '\n'
      << "coupled_dissipation = " << fmt(c.coupled_dissipation) << '\n'
      << "t_end = " << fmt(c.t_end) << '\n'
      << "snapshot_times = " << fmt_list(c.resolved_snapshot_times()) << '\n'
      << "ic = " << (c.ic.kind == InitialKind::Well ? "well" : "ill") << '\n'
      << "ic_q_amplitude = " << fmt(c.ic.q_amplitude) << '\n'
      << "ic_phi_amplitude = " << fmt(c.ic.phi_amplitude) << '\n'
      << "ic_noise = " << fmt(c.ic.noise) << '\n'
      << "seed = " << c.seed << '\n'
      << "output_dir = " << c.output_dir.string() << '\n'
      << "workers = " << c.workers << '\n'
      << "cfl = " << fmt(c.cfl) << '\n'
      << "dt_max = " << fmt(c.dt_max) << '\n'
      << "phase_steps = " << fmt(c.phase_steps) << '\n'
      << "correctors = " << (c.correctors ? "true" : "false") << '\n'
      << "write_snapshots = " << (c.write_snapshots ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace qnl
