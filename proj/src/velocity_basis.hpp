#pragma once

// Orthonormal Hermite-function representation of velocity space.
//
// A velocity profile h(v) is stored through its coefficients in the basis
//   psi_alpha(v) = prod_i He_{alpha_i}(v_i) / sqrt(alpha_i!) * sqrt(M(v)),
// with He the probabilists' Hermite polynomials and M the normalized
// Maxwellian. In this basis psi_0 = sqrt(M), the linearized Fokker-Planck
// operator is diagonal with eigenvalue |alpha|, and the macroscopic moments
// a = <h, sqrt M>, b_i = <h, v_i sqrt M> are single coefficients.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hydrolimit {

using Coeffs = std::vector<double>;

enum class LadderKind {
  MultiplyV,   // h -> v_i h
  Derivative,  // h -> d h / d v_i
  Drift,       // h -> (d/dv_i - v_i/2) h
};

class VelocityBasis {
 public:
  /// Throws ConfigError unless dv is 1, 2 or 3 and modes >= 3.
  VelocityBasis(int dv, int modes);

  int dim() const noexcept { return dim_; }
  int modes() const noexcept { return modes_; }
  /// Number of coefficients: modes^dim (full tensor product).
  std::size_t size() const noexcept { return size_; }

  std::size_t stride(int axis) const noexcept { return strides_[axis]; }
  int component(std::size_t index, int axis) const noexcept {
    return static_cast<int>((index / strides_[axis]) % modes_);
  }
  /// Total Hermite degree |alpha| of a flat coefficient index.
  int degree(std::size_t index) const noexcept { return degree_[index]; }
  std::size_t index_of(std::span<const int> alpha) const;
  /// Flat index of power * e_axis.
  std::size_t axis_index(int axis, int power) const noexcept {
    return strides_[axis] * static_cast<std::size_t>(power);
  }

  /// One-dimensional Gauss-Hermite nodes and weights for the weight M(v) (weights sum to 1).
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  /// Tensor-product quadrature points; point p uses the same flat layout as coefficients.
  std::size_t num_points() const noexcept { return size_; }
  std::vector<double> point(std::size_t p) const;
  double point_weight(std::size_t p) const;

  double ladder_up(int n) const noexcept { return ladder_up_[n]; }
  double ladder_down(int n) const noexcept { return ladder_down_[n]; }

  /// psi_n(v) in one dimension.
  static double hermite_function(int n, double v);
  /// He_n(v)/sqrt(n!) for n = 0..count-1.
  static std::vector<double> normalized_hermite(int count, double v);

  /// Coefficients <h, psi_alpha> from samples of h at the tensor quadrature points.
  Coeffs analyze(std::span<const double> samples) const;
  /// h(v) = sum_alpha c_alpha psi_alpha(v) at an arbitrary velocity.
  double synthesize(std::span<const double> coeffs, std::span<const double> v) const;
  /// h at every tensor quadrature point.
  std::vector<double> synthesize_at_nodes(std::span<const double> coeffs) const;

 private:
  void apply_axis(std::vector<double>& data, int axis, const std::vector<double>& matrix) const;

  int dim_;
  int modes_;
  std::size_t size_;
  std::vector<std::size_t> strides_;
  std::vector<int> degree_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> ladder_up_;
  std::vector<double> ladder_down_;
  std::vector<double> analysis_;   // [n * modes + p] = w_p phi_n(v_p) / sqrt(M(v_p))
  std::vector<double> synthesis_;  // [p * modes + n] = psi_n(v_p)
};

/// (2 pi)^{-dv/2} exp(-|v|^2 / 2).
double maxwellian(int dv, std::span<const double> v);
inline double maxwellian(const VelocityBasis& basis, std::span<const double> v) {
  return maxwellian(basis.dim(), v);
}

double inner(std::span<const double> f, std::span<const double> g);

/// Linearized Fokker-Planck operator: (L h)_alpha = |alpha| h_alpha.
Coeffs apply_L(const VelocityBasis& basis, std::span<const double> coeffs);

struct MacroMicro {
  double a = 0.0;
  std::vector<double> b;  // one entry per velocity axis
  Coeffs micro;           // (I - P) h
};

MacroMicro decompose(const VelocityBasis& basis, std::span<const double> coeffs);
/// (I - P) h without allocating the macro parts.
Coeffs micro_part(const VelocityBasis& basis, std::span<const double> coeffs);
void remove_macro(const VelocityBasis& basis, std::span<double> coeffs);

/// Tridiagonal realization of v_i, d/dv_i or the drift d/dv_i - v_i/2. The
/// component pushed above the top mode is dropped.
Coeffs apply_ladder(const VelocityBasis& basis, std::span<const double> coeffs, LadderKind kind,
                    int axis = 0);
/// Accumulating form: out += scale * ladder(coeffs).
void add_ladder(const VelocityBasis& basis, std::span<const double> coeffs, LadderKind kind,
                int axis, double scale, std::span<double> out);

/// int |grad_v h|^2 + (1 + |v|^2) |h|^2 dv, evaluated without truncation.
double nu_norm_sq(const VelocityBasis& basis, std::span<const double> coeffs);

/// Gamma_ij(h) = int h (v_i v_j - delta_ij) sqrt(M) dv by quadrature (i, j zero-based).
double gamma_moment(const VelocityBasis& basis, std::span<const double> coeffs, int i, int j);

struct CoercivityReport {
  double ratio = 0.0;
  double numerator = 0.0;     // <L h, h>
  double micro_nu_sq = 0.0;   // ||(I - P) h||_nu^2
  double b_sq = 0.0;          // |b|^2
};

/// <L h, h> / (||(I-P)h||_nu^2 + |b|^2). Throws DomainError for h in Ker L.
CoercivityReport coercivity_ratio(const VelocityBasis& basis, std::span<const double> coeffs);

// ---------------------------------------------------------------------------
// Untruncated Hermite tensors. Each exact ladder application grows the axis it
// acts on by one mode, so norms built from them carry no closure error.

template <class T>
struct HermiteTensor {
  std::vector<int> dims;
  std::vector<T> data;

  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = static_cast<int>(dims.size()) - 1; a > axis; --a) s *= dims[a];
    return s;
  }
};

template <class T>
HermiteTensor<T> make_tensor(const VelocityBasis& basis, std::span<const T> coeffs) {
  HermiteTensor<T> t;
  t.dims.assign(basis.dim(), basis.modes());
  t.data.assign(coeffs.begin(), coeffs.end());
  return t;
}

/// d/dv_axis applied exactly: result has dims[axis] + 1 modes along axis.
template <class T>
HermiteTensor<T> exact_derivative(const HermiteTensor<T>& in, int axis) {
  HermiteTensor<T> out;
  out.dims = in.dims;
  out.dims[axis] += 1;
  std::size_t total = 1;
  for (int d : out.dims) total *= d;
  out.data.assign(total, T{});
  const std::size_t s_in = in.stride(axis);
  const std::size_t s_out = out.stride(axis);
  const int n_in = in.dims[axis];
  const std::size_t outer = in.data.size() / (s_in * n_in);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t r = 0; r < s_in; ++r) {
      const T* src = in.data.data() + o * s_in * n_in + r;
      T* dst = out.data.data() + o * s_out * (n_in + 1) + r;
      for (int n = 0; n < n_in; ++n) {
        const T c = src[n * s_in];
        if (n > 0) dst[(n - 1) * s_out] += 0.5 * std::sqrt(static_cast<double>(n)) * c;
        dst[(n + 1) * s_out] -= 0.5 * std::sqrt(static_cast<double>(n + 1)) * c;
      }
    }
  }
  return out;
}

namespace detail {
inline double abs_sq(double x) { return x * x; }
inline double abs_sq(std::complex<double> x) { return std::norm(x); }
}  // namespace detail

/// ||h||_nu^2 of an untruncated tensor.
template <class T>
double nu_norm_sq_exact(const HermiteTensor<T>& t) {
  double total = 0.0;
  for (const T& c : t.data) total += detail::abs_sq(c);
  for (int axis = 0; axis < static_cast<int>(t.dims.size()); ++axis) {
    const std::size_t s = t.stride(axis);
    const int n_ax = t.dims[axis];
    const std::size_t outer = t.data.size() / (s * n_ax);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t r = 0; r < s; ++r) {
        const T* line = t.data.data() + o * s * n_ax + r;
        for (int m = 0; m <= n_ax; ++m) {
          T up{}, down{};
          if (m + 1 < n_ax) up = std::sqrt(static_cast<double>(m + 1)) * line[(m + 1) * s];
          if (m >= 1 && m - 1 < n_ax) down = std::sqrt(static_cast<double>(m)) * line[(m - 1) * s];
          total += detail::abs_sq(T(0.5 * (up - down)));  // d/dv
          total += detail::abs_sq(T(up + down));          // v *
        }
      }
    }
  }
  return total;
}

}  // namespace hydrolimit
