#pragma once

// Periodic one-dimensional grid with Fourier spectral differentiation.

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace hydrolimit {

using ScalarField = std::vector<double>;
/// Vector fields have one component per spatial dimension; the grid is one-dimensional.
using VectorField = std::vector<double>;
using Spectrum = std::vector<std::complex<double>>;

class Grid {
 public:
  /// Throws ConfigError unless nx is even, nx >= 8 and length > 0.
  Grid(int nx, double length);

  int size() const noexcept { return nx_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / nx_; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  /// Nonnegative wavenumbers 2 pi m / L, m = 0..nx/2 (real-to-complex layout).
  const std::vector<double>& wavenumbers() const noexcept { return k_; }
  std::size_t num_modes() const noexcept { return k_.size(); }

  /// Normalized forward transform: coefficient m multiplies exp(i k_m x).
  Spectrum forward(std::span<const double> f) const;
  ScalarField inverse(std::span<const std::complex<double>> spec) const;

  /// d^order f / dx^order; the Nyquist mode is dropped for odd orders.
  ScalarField derivative(std::span<const double> f, int order = 1) const;
  /// Multiplies mode m by multiplier[m] (a real Fourier symbol).
  ScalarField apply_symbol(std::span<const double> f, std::span<const double> multiplier) const;

  /// Spectral symbol of d^order/dx^order on mode m.
  std::complex<double> derivative_symbol(std::size_t m, int order) const;
  /// |symbol|^2 weight used by Parseval sums (0 on Nyquist for odd orders).
  double derivative_weight(std::size_t m, int order) const;
  /// Multiplicity of mode m in a real signal (1 for m = 0 and Nyquist, else 2).
  double mode_multiplicity(std::size_t m) const noexcept {
    return (m == 0 || static_cast<int>(m) == nx_ / 2) ? 1.0 : 2.0;
  }

  /// (L/nx) sum f g.
  double inner(std::span<const double> f, std::span<const double> g) const;
  double l2_norm_sq(std::span<const double> f) const { return inner(f, f); }
  /// sum_{m <= k} ||d^m f||^2.
  double sobolev_norm_sq(std::span<const double> f, int k) const;
  /// Same, from a precomputed spectrum.
  double sobolev_norm_sq(std::span<const std::complex<double>> spec, int k) const;
  double mean(std::span<const double> f) const;
  double integrate(std::span<const double> f) const { return mean(f) * length_; }
  double max_abs(std::span<const double> f) const;

 private:
  struct Plans;
  int nx_;
  double length_;
  std::vector<double> nodes_;
  std::vector<double> k_;
  std::shared_ptr<const Plans> plans_;
};

ScalarField constant_field(const Grid& grid, double value);

}  // namespace hydrolimit
