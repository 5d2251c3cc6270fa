#include "spatial_grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace hydrolimit {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Grid::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  explicit Plans(int n) {
    std::vector<double> in(n);
    std::vector<fftw_complex> out(n / 2 + 1);
    std::lock_guard lock(planner_mutex());
    r2c = fftw_plan_dft_r2c_1d(n, in.data(), out.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    c2r = fftw_plan_dft_c2r_1d(n, out.data(), in.data(),
                               FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

Grid::Grid(int nx, double length) : nx_(nx), length_(length) {
  if (nx < 8 || nx % 2 != 0) {
    throw ConfigError("grid node count must be even and >= 8 (got " + std::to_string(nx) + ")");
  }
  if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("grid length must be positive");
  nodes_.resize(nx);
  for (int j = 0; j < nx; ++j) nodes_[j] = j * length / nx;
  k_.resize(nx / 2 + 1);
  for (int m = 0; m <= nx / 2; ++m) k_[m] = 2.0 * std::numbers::pi * m / length;
  plans_ = std::make_shared<const Plans>(nx);
}

Spectrum Grid::forward(std::span<const double> f) const {
  if (static_cast<int>(f.size()) != nx_) throw ShapeError("field length does not match grid");
  Spectrum out(num_modes());
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(f.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / nx_;
  for (auto& c : out) c *= scale;
  return out;
}

ScalarField Grid::inverse(std::span<const std::complex<double>> spec) const {
  if (spec.size() != num_modes()) throw ShapeError("spectrum length does not match grid");
  Spectrum work(spec.begin(), spec.end());
  ScalarField out(nx_);
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(work.data()), out.data());
  return out;
}

std::complex<double> Grid::derivative_symbol(std::size_t m, int order) const {
  if (order == 0) return 1.0;
  if (order % 2 == 1 && static_cast<int>(m) == nx_ / 2) return 0.0;
  const std::complex<double> ik(0.0, k_[m]);
  std::complex<double> s = 1.0;
  for (int i = 0; i < order; ++i) s *= ik;
  return s;
}

double Grid::derivative_weight(std::size_t m, int order) const {
  return std::norm(derivative_symbol(m, order));
}

ScalarField Grid::derivative(std::span<const double> f, int order) const {
  if (order < 0) throw ConfigError("derivative order must be nonnegative");
  if (order == 0) return ScalarField(f.begin(), f.end());
  auto spec = forward(f);
  for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= derivative_symbol(m, order);
  return inverse(spec);
}

ScalarField Grid::apply_symbol(std::span<const double> f, std::span<const double> multiplier) const {
  if (multiplier.size() != num_modes()) throw ShapeError("symbol length does not match grid");
  auto spec = forward(f);
  for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= multiplier[m];
  return inverse(spec);
}

double Grid::inner(std::span<const double> f, std::span<const double> g) const {
  if (static_cast<int>(f.size()) != nx_ || static_cast<int>(g.size()) != nx_) {
    throw ShapeError("field length does not match grid");
  }
  double acc = 0.0;
  for (int j = 0; j < nx_; ++j) acc += f[j] * g[j];
  return acc * spacing();
}

double Grid::sobolev_norm_sq(std::span<const std::complex<double>> spec, int k) const {
  if (k < 0) throw ConfigError("Sobolev order must be nonnegative");
  double acc = 0.0;
  for (std::size_t m = 0; m < spec.size(); ++m) {
    double w = 0.0;
    for (int j = 0; j <= k; ++j) w += derivative_weight(m, j);
    acc += mode_multiplicity(m) * w * std::norm(spec[m]);
  }
  return acc * length_;
}

double Grid::sobolev_norm_sq(std::span<const double> f, int k) const {
  return sobolev_norm_sq(std::span<const std::complex<double>>(forward(f)), k);
}

double Grid::mean(std::span<const double> f) const {
  if (static_cast<int>(f.size()) != nx_) throw ShapeError("field length does not match grid");
  double acc = 0.0;
  for (double x : f) acc += x;
  return acc / nx_;
}

double Grid::max_abs(std::span<const double> f) const {
  double m = 0.0;
  for (double x : f) m = std::max(m, std::abs(x));
  return m;
}

ScalarField constant_field(const Grid& grid, double value) {
  return ScalarField(grid.size(), value);
}

}  // namespace hydrolimit
