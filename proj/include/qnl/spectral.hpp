#pragma once

// Fourier representation of real periodic fields on the torus [0, 2*pi)^N.
//
// Coefficients follow the Fourier-series convention
//   f_hat(k) = (2 pi)^{-N} \int f(x) exp(-i k.x) dx,
// so f(x) = sum_k f_hat(k) exp(i k.x) and the mean of f is f_hat(0).
// Storage is the full complex array in FFT order, row-major with axis 0
// slowest; along each axis index j holds wavenumber j for j < n/2 and
// j - n otherwise (the Nyquist mode is -n/2).

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qnl {

using Complex = std::complex<double>;

class TorusGrid {
 public:
  TorusGrid() = default;

  int dims() const noexcept { return dims_; }
  int resolution() const noexcept { return n_; }
  std::size_t size() const noexcept { return size_; }
  double spacing() const noexcept;

  int wavenumber(int index) const noexcept { return index < n_ / 2 ? index : index - n_; }
  bool is_nyquist(int index) const noexcept { return index == n_ / 2; }

  // Multi-index of a flat position; unused trailing entries are 0.
  std::array<int, 3> unravel(std::size_t flat) const noexcept;
  std::array<int, 3> wavevector(std::size_t flat) const noexcept;
  std::array<double, 3> point(std::size_t flat) const noexcept;
  // |k|^2 using the true wavenumbers.
  double wavenumber_sq(std::size_t flat) const noexcept;

  // Largest |k| kept by the 2/3 rule (3|k| < n).
  int dealias_cutoff() const noexcept { return (n_ - 1) / 3; }

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  friend TorusGrid make_grid(int dims, int resolution);
  TorusGrid(int dims, int n);

  int dims_ = 0;
  int n_ = 0;
  std::size_t size_ = 0;
};

TorusGrid make_grid(int dims, int resolution);

class SpectralScalar {
 public:
  SpectralScalar() = default;
  explicit SpectralScalar(const TorusGrid& grid);
  SpectralScalar(const TorusGrid& grid, std::vector<Complex> coeffs);

  static SpectralScalar constant(const TorusGrid& grid, double value);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::span<Complex> coeffs() noexcept { return coeffs_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  Complex& operator[](std::size_t flat) { return coeffs_[flat]; }
  const Complex& operator[](std::size_t flat) const { return coeffs_[flat]; }
  Complex mean() const { return coeffs_.empty() ? Complex{} : coeffs_[0]; }

  SpectralScalar& operator+=(const SpectralScalar& other);
  SpectralScalar& operator-=(const SpectralScalar& other);
  SpectralScalar& operator*=(double a);
  // this += a * other
  SpectralScalar& axpy(double a, const SpectralScalar& other);

  friend SpectralScalar operator+(SpectralScalar a, const SpectralScalar& b) { return a += b; }
  friend SpectralScalar operator-(SpectralScalar a, const SpectralScalar& b) { return a -= b; }
  friend SpectralScalar operator*(double a, SpectralScalar f) { return f *= a; }
  friend SpectralScalar operator*(SpectralScalar f, double a) { return f *= a; }
  friend SpectralScalar operator-(SpectralScalar f) { return f *= -1.0; }

 private:
  TorusGrid grid_;
  std::vector<Complex> coeffs_;
};

class SpectralVector {
 public:
  SpectralVector() = default;
  // Zero field with grid.dims() components.
  explicit SpectralVector(const TorusGrid& grid);
  explicit SpectralVector(std::vector<SpectralScalar> components);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return components_.size(); }
  SpectralScalar& operator[](std::size_t i) { return components_[i]; }
  const SpectralScalar& operator[](std::size_t i) const { return components_[i]; }
  auto begin() noexcept { return components_.begin(); }
  auto end() noexcept { return components_.end(); }
  auto begin() const noexcept { return components_.begin(); }
  auto end() const noexcept { return components_.end(); }

  SpectralVector& operator+=(const SpectralVector& other);
  SpectralVector& operator-=(const SpectralVector& other);
  SpectralVector& operator*=(double a);
  SpectralVector& axpy(double a, const SpectralVector& other);

  friend SpectralVector operator+(SpectralVector a, const SpectralVector& b) { return a += b; }
  friend SpectralVector operator-(SpectralVector a, const SpectralVector& b) { return a -= b; }
  friend SpectralVector operator*(double a, SpectralVector f) { return f *= a; }
  friend SpectralVector operator*(SpectralVector f, double a) { return f *= a; }
  friend SpectralVector operator-(SpectralVector f) { return f *= -1.0; }

 private:
  TorusGrid grid_;
  std::vector<SpectralScalar> components_;
};

// ---- transforms -----------------------------------------------------------

SpectralScalar transform_forward(const TorusGrid& grid, std::span<const double> samples);
std::vector<double> transform_inverse(const SpectralScalar& f);

// Samples fn at the collocation points x_j = 2 pi j / n and transforms.
SpectralScalar sample(const TorusGrid& grid,
                      const std::function<double(const std::array<double, 3>&)>& fn);

// ---- linear operators -----------------------------------------------------

// Multiplication by i k_axis; modes with k_axis = -n/2 are zeroed.
SpectralScalar derivative(const SpectralScalar& f, int axis);
SpectralVector gradient(const SpectralScalar& f);
SpectralScalar divergence(const SpectralVector& u);
// 2D: scalar vorticity in component 0; 3D: the usual curl.
SpectralVector curl(const SpectralVector& u);
SpectralScalar laplacian(const SpectralScalar& f);
SpectralVector laplacian(const SpectralVector& u);

inline constexpr double kDefaultMeanTol = 1e-10;

// Mean-zero g with laplacian(g) = f. Throws NonZeroMean if |f_hat(0)| > mean_tol.
SpectralScalar inverse_laplacian(const SpectralScalar& f, double mean_tol = kDefaultMeanTol);

// Multiplies mode k by fn(k, |k|^2); used for integrating factors.
SpectralScalar scale_modes(const SpectralScalar& f,
                           const std::function<double(const std::array<int, 3>&, double)>& fn);

// ---- nonlinear ------------------------------------------------------------

// Zeroes every mode with some |k_axis| > dealias_cutoff().
SpectralScalar dealias(const SpectralScalar& f);
SpectralVector dealias(const SpectralVector& u);

SpectralScalar product(const SpectralScalar& f, const SpectralScalar& g);
SpectralScalar dot(const SpectralVector& u, const SpectralVector& w);
// (a . grad) f
SpectralScalar advect(const SpectralVector& a, const SpectralScalar& f);
// (a . grad) w, component-wise
SpectralVector advect(const SpectralVector& a, const SpectralVector& w);
// f * w, component-wise
SpectralVector scale(const SpectralScalar& f, const SpectralVector& w);
// Pointwise fn(f(x)) of the dealiased field, result dealiased.
SpectralScalar map_pointwise(const SpectralScalar& f, const std::function<double(double)>& fn);

// ---- norms and reductions -------------------------------------------------

// ( sum_k (1 + |k|^2)^s |f_hat(k)|^2 )^{1/2}
double sobolev_norm(const SpectralScalar& f, double s);
double sobolev_norm(const SpectralVector& u, double s);

// (2 pi)^{-N} \int f g dx for real fields.
double inner(const SpectralScalar& f, const SpectralScalar& g);
double inner(const SpectralVector& u, const SpectralVector& w);

double min_value(const SpectralScalar& f);
double max_abs_value(const SpectralScalar& f);
double max_abs_value(const SpectralVector& u);
// Largest coefficient modulus; the "machine precision" yardstick for identities.
double max_abs_coeff(const SpectralScalar& f);
double max_abs_coeff(const SpectralVector& u);

void require_same_grid(const TorusGrid& a, const TorusGrid& b);

}  // namespace qnl
