#pragma once

// Shared time-stepping machinery: the Lawson (integrating-factor) RK4 step,
// the snapshot-aligned step planner and cubic Hermite interpolation.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "qnl/error.hpp"

namespace qnl {

struct DtPolicy {
  double cfl = 0.5;       // dt <= cfl * h / max|u|
  double dt_max = 0.05;   // hard upper bound
  double fixed_dt = 0.0;  // > 0 overrides the adaptive choice (still snapped to snapshots)
  double guard_sobolev_index = 3.0;
  double guard_factor = 1e6;  // blow-up when ||u||_{H^s} > factor * max(1, initial)
};

// One Lawson RK4 step of y' = L y + N(y, t), with propagate(y, h) = exp(hL) y.
// nonlinear(y, c) receives the stage time offset c in {0, h/2, h}.
// `fix` is applied to every stage value and the result (e.g. a projection).
// State must provide copy, axpy(double, const State&) and operator*=.
template <class State, class Nonlinear, class Propagate, class Fix>
State lawson_rk4(const State& y, double h, Nonlinear&& nonlinear, Propagate&& propagate, Fix&& fix) {
  const State k1 = nonlinear(y, 0.0);

  State y2 = y;
  y2.axpy(0.5 * h, k1);
  y2 = propagate(y2, 0.5 * h);
  fix(y2);
  const State k2 = nonlinear(y2, 0.5 * h);

  const State y_half = propagate(y, 0.5 * h);
  State y3 = y_half;
  y3.axpy(0.5 * h, k2);
  fix(y3);
  const State k3 = nonlinear(y3, 0.5 * h);

  State y4 = propagate(y, h);
  y4.axpy(h, propagate(k3, 0.5 * h));
  fix(y4);
  const State k4 = nonlinear(y4, h);

  State k23 = k2;
  k23.axpy(1.0, k3);
  State out = propagate(y, h);
  out.axpy(h / 6.0, propagate(k1, h));
  out.axpy(h / 3.0, propagate(k23, 0.5 * h));
  out.axpy(h / 6.0, k4);
  fix(out);
  return out;
}

// Equal substeps covering [t0, t1] no longer than dt_target.
struct Substeps {
  int count = 1;
  double dt = 0.0;
};

inline Substeps plan_substeps(double t0, double t1, double dt_target) {
  if (!(dt_target > 0.0) || !std::isfinite(dt_target))
    throw Error(ErrorCode::InvalidTimeStep, "non-positive time step");
  const double span = t1 - t0;
  if (span <= 0.0) return {0, 0.0};
  const int count = std::max(1, static_cast<int>(std::ceil(span / dt_target - 1e-9)));
  return {count, span / count};
}

// Strictly increasing snapshot times starting at 0 and ending at t_end.
std::vector<double> normalize_snapshot_times(std::span<const double> requested, double t_end);
std::vector<double> evenly_spaced_times(double t_end, int count);

// Cubic Hermite weights at fraction s in [0, 1] of an interval of length h:
// f = w[0] f0 + w[1] f0' + w[2] f1 + w[3] f1'.
inline std::array<double, 4> hermite_weights(double s, double h) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return {2 * s3 - 3 * s2 + 1, h * (s3 - 2 * s2 + s), -2 * s3 + 3 * s2, h * (s3 - s2)};
}

}  // namespace qnl
