#include "qnl/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "qnl/error.hpp"

namespace qnl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDims: return "InvalidDims";
    case ErrorCode::InvalidResolution: return "InvalidResolution";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::AxisOutOfRange: return "AxisOutOfRange";
    case ErrorCode::NonZeroMean: return "NonZeroMean";
    case ErrorCode::NotGradient: return "NotGradient";
    case ErrorCode::InvalidLambda: return "InvalidLambda";
    case ErrorCode::InvalidTimeStep: return "InvalidTimeStep";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::MassDefect: return "MassDefect";
    case ErrorCode::DegenerateDensity: return "DegenerateDensity";
    case ErrorCode::NonpositiveTemperature: return "NonpositiveTemperature";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::DensityNotPositive: return "DensityNotPositive";
    case ErrorCode::NotDivergenceFree: return "NotDivergenceFree";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::TimeGridMismatch: return "TimeGridMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

// ---- grid -----------------------------------------------------------------

TorusGrid::TorusGrid(int dims, int n) : dims_(dims), n_(n) {
  size_ = 1;
  for (int a = 0; a < dims; ++a) size_ *= static_cast<std::size_t>(n);
}

TorusGrid make_grid(int dims, int resolution) {
  if (dims != 2 && dims != 3)
    throw Error(ErrorCode::InvalidDims, "dims must be 2 or 3, got " + std::to_string(dims));
  if (resolution < 8 || resolution % 2 != 0)
    throw Error(ErrorCode::InvalidResolution,
                "resolution must be even and >= 8, got " + std::to_string(resolution));
  return TorusGrid(dims, resolution);
}

double TorusGrid::spacing() const noexcept { return 2.0 * std::numbers::pi / n_; }

std::array<int, 3> TorusGrid::unravel(std::size_t flat) const noexcept {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dims_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n_);
    flat /= n_;
  }
  return idx;
}

std::array<int, 3> TorusGrid::wavevector(std::size_t flat) const noexcept {
  auto idx = unravel(flat);
  for (int a = 0; a < dims_; ++a) idx[a] = wavenumber(idx[a]);
  return idx;
}

std::array<double, 3> TorusGrid::point(std::size_t flat) const noexcept {
  const auto idx = unravel(flat);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dims_; ++a) x[a] = spacing() * idx[a];
  return x;
}

double TorusGrid::wavenumber_sq(std::size_t flat) const noexcept {
  const auto k = wavevector(flat);
  return double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b) {
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, "operands live on different grids");
}

// ---- FFT plans ------------------------------------------------------------

namespace {

// FFTW planning is not thread-safe; execution with new-array execute is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const TorusGrid& grid, int sign) {
    const auto key = std::make_tuple(grid.dims(), grid.resolution(), sign);
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<int> shape(grid.dims(), grid.resolution());
    std::vector<fftw_complex> scratch(grid.size());
    fftw_plan plan = fftw_plan_dft(grid.dims(), shape.data(), scratch.data(), scratch.data(), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(const TorusGrid& grid, int sign, std::vector<Complex>& data) {
  fftw_plan plan = PlanCache::instance().get(grid, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

SpectralScalar transform_forward(const TorusGrid& grid, std::span<const double> samples) {
  if (samples.size() != grid.size())
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(grid.size()) +
                                              " samples, got " + std::to_string(samples.size()));
  std::vector<Complex> data(samples.begin(), samples.end());
  execute(grid, FFTW_FORWARD, data);
  const double norm = 1.0 / static_cast<double>(grid.size());
  for (auto& c : data) c *= norm;
  return SpectralScalar(grid, std::move(data));
}

std::vector<double> transform_inverse(const SpectralScalar& f) {
  std::vector<Complex> data(f.coeffs().begin(), f.coeffs().end());
  execute(f.grid(), FFTW_BACKWARD, data);
  std::vector<double> out(data.size());
  std::transform(data.begin(), data.end(), out.begin(), [](const Complex& c) { return c.real(); });
  return out;
}

SpectralScalar sample(const TorusGrid& grid,
                      const std::function<double(const std::array<double, 3>&)>& fn) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = fn(grid.point(i));
  return transform_forward(grid, values);
}

// ---- containers -----------------------------------------------------------

SpectralScalar::SpectralScalar(const TorusGrid& grid) : grid_(grid), coeffs_(grid.size()) {}

SpectralScalar::SpectralScalar(const TorusGrid& grid, std::vector<Complex> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid.size())
    throw Error(ErrorCode::ShapeMismatch, "coefficient array does not match grid");
}

SpectralScalar SpectralScalar::constant(const TorusGrid& grid, double value) {
  SpectralScalar f(grid);
  f.coeffs_[0] = value;
  return f;
}

SpectralScalar& SpectralScalar::operator+=(const SpectralScalar& other) { return axpy(1.0, other); }
SpectralScalar& SpectralScalar::operator-=(const SpectralScalar& other) { return axpy(-1.0, other); }

SpectralScalar& SpectralScalar::operator*=(double a) {
  for (auto& c : coeffs_) c *= a;
  return *this;
}

SpectralScalar& SpectralScalar::axpy(double a, const SpectralScalar& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * other.coeffs_[i];
  return *this;
}

SpectralVector::SpectralVector(const TorusGrid& grid)
    : grid_(grid), components_(grid.dims(), SpectralScalar(grid)) {}

SpectralVector::SpectralVector(std::vector<SpectralScalar> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorCode::ShapeMismatch, "vector field needs components");
  grid_ = components_.front().grid();
  if (static_cast<int>(components_.size()) != grid_.dims())
    throw Error(ErrorCode::ShapeMismatch, "vector field needs one component per axis");
  for (const auto& c : components_) require_same_grid(grid_, c.grid());
}

SpectralVector& SpectralVector::operator+=(const SpectralVector& other) { return axpy(1.0, other); }
SpectralVector& SpectralVector::operator-=(const SpectralVector& other) { return axpy(-1.0, other); }

SpectralVector& SpectralVector::operator*=(double a) {
  for (auto& c : components_) c *= a;
  return *this;
}

SpectralVector& SpectralVector::axpy(double a, const SpectralVector& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < components_.size(); ++i) components_[i].axpy(a, other.components_[i]);
  return *this;
}

// ---- linear operators -----------------------------------------------------

SpectralScalar derivative(const SpectralScalar& f, int axis) {
  const auto& grid = f.grid();
  if (axis < 0 || axis >= grid.dims())
    throw Error(ErrorCode::AxisOutOfRange, "axis " + std::to_string(axis));
  SpectralScalar out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = grid.unravel(i);
    if (grid.is_nyquist(idx[axis])) continue;
    out[i] = Complex(0.0, grid.wavenumber(idx[axis])) * f[i];
  }
  return out;
}

SpectralVector gradient(const SpectralScalar& f) {
  std::vector<SpectralScalar> comps;
  for (int a = 0; a < f.grid().dims(); ++a) comps.push_back(derivative(f, a));
  return SpectralVector(std::move(comps));
}

SpectralScalar divergence(const SpectralVector& u) {
  SpectralScalar out(u.grid());
  for (std::size_t a = 0; a < u.size(); ++a) out += derivative(u[a], static_cast<int>(a));
  return out;
}

SpectralVector curl(const SpectralVector& u) {
  const auto& grid = u.grid();
  if (grid.dims() == 2) {
    SpectralVector out(grid);
    out[0] = derivative(u[1], 0) - derivative(u[0], 1);
    return out;
  }
  std::vector<SpectralScalar> comps{derivative(u[2], 1) - derivative(u[1], 2),
                                    derivative(u[0], 2) - derivative(u[2], 0),
                                    derivative(u[1], 0) - derivative(u[0], 1)};
  return SpectralVector(std::move(comps));
}

SpectralScalar laplacian(const SpectralScalar& f) {
  return scale_modes(f, [](const std::array<int, 3>&, double k2) { return -k2; });
}

SpectralVector laplacian(const SpectralVector& u) {
  SpectralVector out(u.grid());
  for (std::size_t a = 0; a < u.size(); ++a) out[a] = laplacian(u[a]);
  return out;
}

SpectralScalar inverse_laplacian(const SpectralScalar& f, double mean_tol) {
  if (std::abs(f.mean()) > mean_tol)
    throw Error(ErrorCode::NonZeroMean,
                "inverse Laplacian of a field with mean " + std::to_string(std::abs(f.mean())));
  return scale_modes(f, [](const std::array<int, 3>&, double k2) { return k2 > 0 ? -1.0 / k2 : 0.0; });
}

SpectralScalar scale_modes(const SpectralScalar& f,
                           const std::function<double(const std::array<int, 3>&, double)>& fn) {
  const auto& grid = f.grid();
  SpectralScalar out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = grid.wavevector(i);
    const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    out[i] = fn(k, k2) * f[i];
  }
  return out;
}

// ---- nonlinear ------------------------------------------------------------

SpectralScalar dealias(const SpectralScalar& f) {
  const auto& grid = f.grid();
  const int cutoff = grid.dealias_cutoff();
  SpectralScalar out = f;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = grid.wavevector(i);
    for (int a = 0; a < grid.dims(); ++a) {
      if (std::abs(k[a]) > cutoff) {
        out[i] = 0.0;
        break;
      }
    }
  }
  return out;
}

SpectralVector dealias(const SpectralVector& u) {
  SpectralVector out(u.grid());
  for (std::size_t a = 0; a < u.size(); ++a) out[a] = dealias(u[a]);
  return out;
}

SpectralScalar product(const SpectralScalar& f, const SpectralScalar& g) {
  require_same_grid(f.grid(), g.grid());
  const auto fx = transform_inverse(dealias(f));
  const auto gx = transform_inverse(dealias(g));
  std::vector<double> prod(fx.size());
  for (std::size_t i = 0; i < fx.size(); ++i) prod[i] = fx[i] * gx[i];
  return dealias(transform_forward(f.grid(), prod));
}

SpectralScalar dot(const SpectralVector& u, const SpectralVector& w) {
  require_same_grid(u.grid(), w.grid());
  SpectralScalar out(u.grid());
  for (std::size_t a = 0; a < u.size(); ++a) out += product(u[a], w[a]);
  return out;
}

SpectralScalar advect(const SpectralVector& a, const SpectralScalar& f) {
  return dot(a, gradient(f));
}

SpectralVector advect(const SpectralVector& a, const SpectralVector& w) {
  SpectralVector out(w.grid());
  for (std::size_t c = 0; c < w.size(); ++c) out[c] = advect(a, w[c]);
  return out;
}

SpectralVector scale(const SpectralScalar& f, const SpectralVector& w) {
  SpectralVector out(w.grid());
  for (std::size_t c = 0; c < w.size(); ++c) out[c] = product(f, w[c]);
  return out;
}

SpectralScalar map_pointwise(const SpectralScalar& f, const std::function<double(double)>& fn) {
  auto fx = transform_inverse(dealias(f));
  for (auto& v : fx) v = fn(v);
  return dealias(transform_forward(f.grid(), fx));
}

// ---- norms ----------------------------------------------------------------

namespace {

double sobolev_sq(const SpectralScalar& f, double s) {
  const auto& grid = f.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = s == 0.0 ? 1.0 : std::pow(1.0 + grid.wavenumber_sq(i), s);
    sum += w * std::norm(f[i]);
  }
  return sum;
}

}  // namespace

double sobolev_norm(const SpectralScalar& f, double s) { return std::sqrt(sobolev_sq(f, s)); }

double sobolev_norm(const SpectralVector& u, double s) {
  double sum = 0.0;
  for (const auto& c : u) sum += sobolev_sq(c, s);
  return std::sqrt(sum);
}

double inner(const SpectralScalar& f, const SpectralScalar& g) {
  require_same_grid(f.grid(), g.grid());
  double sum = 0.0;
  for (std::size_t i = 0; i < f.grid().size(); ++i) sum += (std::conj(f[i]) * g[i]).real();
  return sum;
}

double inner(const SpectralVector& u, const SpectralVector& w) {
  double sum = 0.0;
  for (std::size_t a = 0; a < u.size(); ++a) sum += inner(u[a], w[a]);
  return sum;
}

double min_value(const SpectralScalar& f) {
  const auto fx = transform_inverse(f);
  return *std::min_element(fx.begin(), fx.end());
}

double max_abs_value(const SpectralScalar& f) {
  double m = 0.0;
  for (double v : transform_inverse(f)) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_value(const SpectralVector& u) {
  double m = 0.0;
  for (const auto& c : u) m = std::max(m, max_abs_value(c));
  return m;
}

double max_abs_coeff(const SpectralScalar& f) {
  double m = 0.0;
  for (const auto& c : f.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

double max_abs_coeff(const SpectralVector& u) {
  double m = 0.0;
  for (const auto& c : u) m = std::max(m, max_abs_coeff(c));
  return m;
}

}  // namespace qnl
