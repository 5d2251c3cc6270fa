#include "velocity_basis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace hydrolimit {

namespace {

// Zeros of He_n via the symmetric Jacobi matrix, polished by Newton on the
// normalized recurrence and symmetrized.
std::vector<double> hermite_zeros(int n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
  std::vector<double> x(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::sort(x.begin(), x.end());
  for (double& xi : x) {
    for (int it = 0; it < 4; ++it) {
      const auto phi = VelocityBasis::normalized_hermite(n + 1, xi);
      const double deriv = std::sqrt(static_cast<double>(n)) * phi[n - 1];
      if (deriv == 0.0) break;
      const double step = phi[n] / deriv;
      xi -= step;
      if (std::abs(step) < 1e-16 * (1.0 + std::abs(xi))) break;
    }
  }
  for (int k = 0; k < n / 2; ++k) {
    const double s = 0.5 * (x[n - 1 - k] - x[k]);
    x[k] = -s;
    x[n - 1 - k] = s;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return x;
}

double sqrt_maxwellian_1d(double v) {
  return std::exp(-0.25 * v * v) / std::sqrt(std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

VelocityBasis::VelocityBasis(int dv, int modes) : dim_(dv), modes_(modes) {
  if (dv < 1 || dv > 3) {
    throw ConfigError("velocity dimension must be 1, 2 or 3 (got " + std::to_string(dv) + ")");
  }
  if (modes < 3) {
    throw ConfigError("Hermite mode count must be >= 3 (got " + std::to_string(modes) + ")");
  }
  size_ = 1;
  for (int a = 0; a < dv; ++a) size_ *= static_cast<std::size_t>(modes);
  strides_.assign(dv, 1);
  for (int a = dv - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * modes;
  degree_.resize(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    int d = 0;
    for (int a = 0; a < dv; ++a) d += component(i, a);
    degree_[i] = d;
  }

  ladder_up_.resize(modes);
  ladder_down_.resize(modes);
  for (int n = 0; n < modes; ++n) {
    ladder_up_[n] = std::sqrt(static_cast<double>(n + 1));
    ladder_down_[n] = std::sqrt(static_cast<double>(n));
  }

  nodes_ = hermite_zeros(modes);
  weights_.resize(modes);
  analysis_.assign(static_cast<std::size_t>(modes) * modes, 0.0);
  synthesis_.assign(static_cast<std::size_t>(modes) * modes, 0.0);
  for (int p = 0; p < modes; ++p) {
    const auto phi = normalized_hermite(modes, nodes_[p]);
    double christoffel = 0.0;
    for (double v : phi) christoffel += v * v;
    weights_[p] = 1.0 / christoffel;
    const double sqm = sqrt_maxwellian_1d(nodes_[p]);
    for (int n = 0; n < modes; ++n) {
      analysis_[n * modes + p] = weights_[p] * phi[n] / sqm;
      synthesis_[p * modes + n] = phi[n] * sqm;
    }
  }
}

std::size_t VelocityBasis::index_of(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != dim_) throw ShapeError("multi-index length mismatch");
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a) {
    if (alpha[a] < 0 || alpha[a] >= modes_) throw ShapeError("multi-index out of range");
    idx += strides_[a] * alpha[a];
  }
  return idx;
}

std::vector<double> VelocityBasis::point(std::size_t p) const {
  std::vector<double> v(dim_);
  for (int a = 0; a < dim_; ++a) v[a] = nodes_[component(p, a)];
  return v;
}

double VelocityBasis::point_weight(std::size_t p) const {
  double w = 1.0;
  for (int a = 0; a < dim_; ++a) w *= weights_[component(p, a)];
  return w;
}

std::vector<double> VelocityBasis::normalized_hermite(int count, double v) {
  std::vector<double> phi(std::max(count, 0));
  if (count > 0) phi[0] = 1.0;
  if (count > 1) phi[1] = v;
  for (int n = 1; n + 1 < count; ++n) {
    phi[n + 1] = (v * phi[n] - std::sqrt(static_cast<double>(n)) * phi[n - 1]) /
                 std::sqrt(static_cast<double>(n + 1));
  }
  return phi;
}

double VelocityBasis::hermite_function(int n, double v) {
  return normalized_hermite(n + 1, v)[n] * sqrt_maxwellian_1d(v);
}

void VelocityBasis::apply_axis(std::vector<double>& data, int axis,
                               const std::vector<double>& matrix) const {
  const std::size_t s = strides_[axis];
  const std::size_t n = static_cast<std::size_t>(modes_);
  const std::size_t outer = size_ / (s * n);
  std::vector<double> line(n), out(n);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t r = 0; r < s; ++r) {
      double* base = data.data() + o * s * n + r;
      for (std::size_t k = 0; k < n; ++k) line[k] = base[k * s];
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += matrix[i * n + k] * line[k];
        out[i] = acc;
      }
      for (std::size_t k = 0; k < n; ++k) base[k * s] = out[k];
    }
  }
}

Coeffs VelocityBasis::analyze(std::span<const double> samples) const {
  if (samples.size() != size_) {
    throw ShapeError("analyze: expected " + std::to_string(size_) + " samples, got " +
                     std::to_string(samples.size()));
  }
  std::vector<double> data(samples.begin(), samples.end());
  for (int a = 0; a < dim_; ++a) apply_axis(data, a, analysis_);
  return data;
}

std::vector<double> VelocityBasis::synthesize_at_nodes(std::span<const double> coeffs) const {
  if (coeffs.size() != size_) throw ShapeError("synthesize: coefficient length mismatch");
  std::vector<double> data(coeffs.begin(), coeffs.end());
  for (int a = 0; a < dim_; ++a) apply_axis(data, a, synthesis_);
  return data;
}

double VelocityBasis::synthesize(std::span<const double> coeffs, std::span<const double> v) const {
  if (coeffs.size() != size_) throw ShapeError("synthesize: coefficient length mismatch");
  if (static_cast<int>(v.size()) != dim_) throw ShapeError("synthesize: velocity dimension mismatch");
  std::vector<std::vector<double>> psi(dim_);
  for (int a = 0; a < dim_; ++a) {
    psi[a] = normalized_hermite(modes_, v[a]);
    const double sqm = sqrt_maxwellian_1d(v[a]);
    for (double& x : psi[a]) x *= sqm;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < size_; ++i) {
    double term = coeffs[i];
    for (int a = 0; a < dim_; ++a) term *= psi[a][component(i, a)];
    total += term;
  }
  return total;
}

double maxwellian(int dv, std::span<const double> v) {
  double v2 = 0.0;
  for (double x : v) v2 += x * x;
  return std::pow(2.0 * std::numbers::pi, -0.5 * dv) * std::exp(-0.5 * v2);
}

double inner(std::span<const double> f, std::span<const double> g) {
  if (f.size() != g.size()) throw ShapeError("inner: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * g[i];
  return acc;
}

Coeffs apply_L(const VelocityBasis& basis, std::span<const double> coeffs) {
  if (coeffs.size() != basis.size()) throw ShapeError("apply_L: coefficient length mismatch");
  Coeffs out(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) out[i] = basis.degree(i) * coeffs[i];
  return out;
}

void remove_macro(const VelocityBasis& basis, std::span<double> coeffs) {
  coeffs[0] = 0.0;
  for (int a = 0; a < basis.dim(); ++a) coeffs[basis.axis_index(a, 1)] = 0.0;
}

Coeffs micro_part(const VelocityBasis& basis, std::span<const double> coeffs) {
  if (coeffs.size() != basis.size()) throw ShapeError("micro_part: coefficient length mismatch");
  Coeffs out(coeffs.begin(), coeffs.end());
  remove_macro(basis, out);
  return out;
}

MacroMicro decompose(const VelocityBasis& basis, std::span<const double> coeffs) {
  MacroMicro mm;
  mm.micro = micro_part(basis, coeffs);
  mm.a = coeffs[0];
  mm.b.resize(basis.dim());
  for (int a = 0; a < basis.dim(); ++a) mm.b[a] = coeffs[basis.axis_index(a, 1)];
  return mm;
}

void add_ladder(const VelocityBasis& basis, std::span<const double> coeffs, LadderKind kind,
                int axis, double scale, std::span<double> out) {
  if (coeffs.size() != basis.size() || out.size() != basis.size()) {
    throw ShapeError("ladder: coefficient length mismatch");
  }
  if (axis < 0 || axis >= basis.dim()) throw ConfigError("ladder: axis outside velocity dimension");
  const std::size_t s = basis.stride(axis);
  const int top = basis.modes() - 1;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const int m = basis.component(i, axis);
    const double below = m >= 1 ? coeffs[i - s] : 0.0;    // c_{m-1}
    const double above = m < top ? coeffs[i + s] : 0.0;   // c_{m+1}
    const double sd = basis.ladder_down(m);               // sqrt(m)
    const double su = basis.ladder_up(m);                 // sqrt(m+1)
    double value = 0.0;
    switch (kind) {
      case LadderKind::MultiplyV: value = sd * below + su * above; break;
      case LadderKind::Derivative: value = 0.5 * (su * above - sd * below); break;
      case LadderKind::Drift: value = -sd * below; break;
    }
    out[i] += scale * value;
  }
}

Coeffs apply_ladder(const VelocityBasis& basis, std::span<const double> coeffs, LadderKind kind,
                    int axis) {
  Coeffs out(coeffs.size(), 0.0);
  add_ladder(basis, coeffs, kind, axis, 1.0, out);
  return out;
}

double nu_norm_sq(const VelocityBasis& basis, std::span<const double> coeffs) {
  if (coeffs.size() != basis.size()) throw ShapeError("nu_norm_sq: coefficient length mismatch");
  return nu_norm_sq_exact(make_tensor<double>(basis, coeffs));
}

double gamma_moment(const VelocityBasis& basis, std::span<const double> coeffs, int i, int j) {
  if (i < 0 || j < 0 || i >= basis.dim() || j >= basis.dim()) {
    throw ConfigError("gamma_moment: index outside velocity dimension");
  }
  const auto values = basis.synthesize_at_nodes(coeffs);
  double acc = 0.0;
  for (std::size_t p = 0; p < basis.num_points(); ++p) {
    const auto v = basis.point(p);
    const double sqm = std::sqrt(maxwellian(basis, v));
    // Quadrature is for the weight M, so divide the integrand by M.
    const double integrand = values[p] * (v[i] * v[j] - (i == j ? 1.0 : 0.0)) / sqm;
    acc += basis.point_weight(p) * integrand;
  }
  return acc;
}

CoercivityReport coercivity_ratio(const VelocityBasis& basis, std::span<const double> coeffs) {
  if (coeffs.size() != basis.size()) throw ShapeError("coercivity_ratio: coefficient length mismatch");
  bool outside_kernel = false;
  for (std::size_t i = 1; i < coeffs.size(); ++i) outside_kernel |= coeffs[i] != 0.0;
  if (!outside_kernel) throw DomainError("coercivity_ratio: input lies in Ker L");
  CoercivityReport r;
  const auto lh = apply_L(basis, coeffs);
  r.numerator = inner(lh, coeffs);
  r.micro_nu_sq = nu_norm_sq(basis, micro_part(basis, coeffs));
  for (int a = 0; a < basis.dim(); ++a) {
    const double b = coeffs[basis.axis_index(a, 1)];
    r.b_sq += b * b;
  }
  r.ratio = r.numerator / (r.micro_nu_sq + r.b_sq);
  return r;
}

}  // namespace hydrolimit
