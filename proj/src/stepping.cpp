#include "qnl/stepping.hpp"

#include <string>

namespace qnl {

std::vector<double> normalize_snapshot_times(std::span<const double> requested, double t_end) {
  if (!(t_end > 0.0)) throw Error(ErrorCode::InvalidTimeStep, "t_end must be positive");
  std::vector<double> times{0.0};
  for (double t : requested) {
    if (t < 0.0 || t > t_end * (1.0 + 1e-12))
      throw Error(ErrorCode::InvalidTimeStep, "snapshot time " + std::to_string(t) + " outside [0, t_end]");
    times.push_back(std::min(t, t_end));
  }
  times.push_back(t_end);
  std::sort(times.begin(), times.end());
  std::vector<double> out;
  for (double t : times)
    if (out.empty() || t - out.back() > 1e-12 * std::max(1.0, t_end)) out.push_back(t);
  out.back() = t_end;
  return out;
}

std::vector<double> evenly_spaced_times(double t_end, int count) {
  if (count < 2) throw Error(ErrorCode::InvalidTimeStep, "need at least two snapshot times");
  std::vector<double> times(count);
  for (int i = 0; i < count; ++i) times[i] = t_end * i / (count - 1);
  times.back() = t_end;
  return times;
}

}  // namespace qnl
