#include <algorithm>
#include <cmath>
#include <complex>

#include "diagnostics.hpp"
#include "errors.hpp"

namespace hydrolimit {

void DiagConfig::validate() const {
  if (order_x < 0 || order_x > 6) throw ConfigError("diagnostics order_x must lie in [0, 6]");
  if (order_v < 0 || order_v > 4) throw ConfigError("diagnostics order_v must lie in [0, 4]");
  auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  bool ok = positive(K1) && positive(cbar);
  for (auto* arr : {&K1_alpha, &K2_alpha, &K3_alpha, &lambda}) {
    for (double w : *arr) ok = ok && positive(w);
  }
  if (!ok) throw ConfigError("diagnostics weights must be positive");
  if (c0_empirical < 0.0) throw ConfigError("empirical coercivity constant must be nonnegative");
}

int DiagConfig::macro_m_order() const { return std::min(6, order_x + 2); }
int DiagConfig::macro_u_order() const { return std::min(5, order_x + 1); }

namespace {

using Complex = std::complex<double>;

double sob(const Grid& grid, std::span<const double> f, int k) {
  if (k < 0 || f.empty()) return 0.0;
  return grid.sobolev_norm_sq(f, k);
}

ScalarField deriv(const Grid& grid, std::span<const double> f, int order) { return grid.derivative(f, order); }

// Fourier modes of a Hermite field, each held as an untruncated tensor so
// velocity derivatives and nu-norms are exact.
class SpectralHermite {
 public:
  SpectralHermite(const Grid& grid, const VelocityBasis& basis, const HermiteField& field) : grid_(grid) {
    modes_.resize(grid.num_modes());
    for (auto& t : modes_) {
      t.dims.assign(basis.dim(), basis.modes());
      t.data.assign(basis.size(), Complex{});
    }
    for (std::size_t a = 0; a < field.ncoef; ++a) {
      const auto spec = grid.forward(field.component(a));
      for (std::size_t m = 0; m < spec.size(); ++m) modes_[m].data[a] = spec[m];
    }
  }

  // Sum over velocity multi-indices v_offset <= |beta| <= v_offset + max_v and
  // |alpha| <= max_total - (|beta| - v_offset) of ||d_x^alpha d_v^beta g||^2.
  double norm_sq(int max_total, int max_v, int v_offset, bool nu) const {
    if (max_total < 0 || max_v < 0) return 0.0;
    double total = 0.0;
    for (std::size_t m = 0; m < modes_.size(); ++m) {
      const double scale = grid_.mode_multiplicity(m) * grid_.length();
      visit(modes_[m], v_offset + max_v, 0, 0, [&](const HermiteTensor<Complex>& t, int order) {
        if (order < v_offset) return;
        const int ax = max_total - (order - v_offset);
        if (ax < 0) return;
        double w = 0.0;
        for (int a = 0; a <= ax; ++a) w += grid_.derivative_weight(m, a);
        if (w == 0.0) return;
        double v = 0.0;
        if (nu) {
          v = nu_norm_sq_exact(t);
        } else {
          for (const auto& c : t.data) v += std::norm(c);
        }
        total += scale * w * v;
      });
    }
    return total;
  }

 private:
  template <class F>
  static void visit(const HermiteTensor<Complex>& t, int max_order, int first_axis, int order, F&& f) {
    f(t, order);
    if (order == max_order) return;
    for (int ax = first_axis; ax < static_cast<int>(t.dims.size()); ++ax) {
      visit(exact_derivative(t, ax), max_order, ax, order + 1, f);
    }
  }

  const Grid& grid_;
  std::vector<HermiteTensor<Complex>> modes_;
};

HermiteField micro_field(const VelocityBasis& basis, const HermiteField& g) {
  HermiteField out = g;
  for (int j = 0; j < out.nx; ++j) remove_macro(basis, out.at(j));
  return out;
}

void check_eps(double eps) {
  if (!(eps > 0.0)) throw DomainError("dissipation functionals require eps > 0");
}

ScalarField composed_density(const PhysParams& params, const RemainderState& rem, const NssState& nss) {
  ScalarField w(rem.rho.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = 1.0 + nss.h0[j] + params.eps * rem.rho[j];
  require_positive(w, "composed fluid density 1 + h0 + eps rho");
  return w;
}

}  // namespace

MacroEnergy macro_energy(const Grid& grid, const PhysParams& params, const DiagConfig& cfg, const NssState& nss) {
  cfg.validate();
  const int n = grid.size();
  const int km = cfg.macro_m_order();
  const int ku = cfg.macro_u_order();
  ScalarField rho(n);
  for (int j = 0; j < n; ++j) rho[j] = 1.0 + nss.h0[j];
  require_positive(rho, "limit fluid density 1 + h0");

  MacroEnergy e;
  const auto dm_top = deriv(grid, nss.m0, km);
  e.E_ma += grid.l2_norm_sq(dm_top);
  for (int a = 1; a <= ku; ++a) {
    const double w = cfg.K1_alpha[a - 1];
    e.E_ma += w * (grid.l2_norm_sq(deriv(grid, nss.h0, a)) + grid.l2_norm_sq(deriv(grid, nss.m0, a)) +
                   grid.l2_norm_sq(deriv(grid, nss.u0, a)));
  }
  for (int a = 0; a <= ku - 1; ++a) {
    e.E_ma += cfg.K2_alpha[a] * grid.l2_norm_sq(deriv(grid, nss.u0, a + 1));
  }
  for (int a = 1; a <= ku; ++a) {
    const auto dh = deriv(grid, nss.h0, a);
    auto du = deriv(grid, nss.u0, a - 1);
    for (int j = 0; j < n; ++j) du[j] *= rho[j] * rho[j];
    e.cross += cfg.K3_alpha[a - 1] * grid.inner(dh, du);
  }
  e.E_ma += e.cross;
  double entropy = 0.0, kinetic = 0.0;
  for (int j = 0; j < n; ++j) {
    kinetic += rho[j] * nss.u0[j] * nss.u0[j];
    entropy += std::expm1(params.gamma * std::log1p(nss.h0[j]));
  }
  const double dx = grid.spacing();
  const double pfac = 2.0 * params.A / (params.gamma - 1.0);
  e.E_ma += cfg.K1 * (grid.l2_norm_sq(nss.m0) + kinetic * dx + pfac * entropy * dx);
  e.baseline = cfg.K1 * pfac * grid.length();

  const auto rates = nss_rates(grid, params, nss);
  const auto mx = deriv(grid, nss.m0, 1);
  const auto ux = deriv(grid, nss.u0, 1);
  const auto hx = deriv(grid, nss.h0, 1);
  const auto mtx = deriv(grid, rates.dm0, 1);
  e.D_ma = sob(grid, mx, ku) + sob(grid, ux, ku) + sob(grid, mtx, ku - 1) + sob(grid, rates.du0, ku - 1) +
           sob(grid, hx, ku - 1) + sob(grid, ux, ku - 1);
  return e;
}

double energy_E(const Grid& grid, const VelocityBasis& basis, const DiagConfig& cfg, const RemainderState& rem,
                const NssState& nss) {
  cfg.validate();
  const int k = cfg.order_x;
  const SpectralHermite sg(grid, basis, rem.g);
  return sg.norm_sq(k, cfg.order_v, 0, false) + sob(grid, rem.u, k) + sob(grid, rem.rho, k) +
         sob(grid, nss.m0, cfg.macro_m_order()) + sob(grid, nss.u0, cfg.macro_u_order()) +
         sob(grid, nss.h0, cfg.macro_u_order());
}

Dissipation dissipation_D(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                          const DiagConfig& cfg, const RemainderState& rem, const NssState& nss,
                          std::span<const double> du_dt) {
  cfg.validate();
  const double eps = params.eps;
  check_eps(eps);
  const int k = cfg.order_x;
  const int n = grid.size();
  const auto micro = micro_field(basis, rem.g);
  const SpectralHermite sm(grid, basis, micro);
  const auto a = rem.a();
  const auto b = rem.b(basis);
  ScalarField slip(n);
  for (int j = 0; j < n; ++j) slip[j] = b[j] - eps * rem.u[j];

  Dissipation d;
  d.stiff = (sm.norm_sq(k, cfg.order_v, 0, true) + sob(grid, slip, k)) / (eps * eps);
  const auto ux = deriv(grid, rem.u, 1);
  const auto bx = deriv(grid, b, 1);
  const auto rx = deriv(grid, rem.rho, 1);
  const auto ax = deriv(grid, a, 1);
  d.total = d.stiff + 2.0 * sob(grid, ux, k) + 2.0 / eps * sob(grid, bx, k - 1) + sob(grid, du_dt, k - 1) +
            sob(grid, rx, k - 1) + sob(grid, ax, k - 1) + macro_energy(grid, params, cfg, nss).D_ma;
  return d;
}

MicroFunctionals micro_functionals(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                                   const DiagConfig& cfg, const RemainderState& rem, const NssState& nss,
                                   std::span<const double> du_dt) {
  cfg.validate();
  const double eps = params.eps;
  check_eps(eps);
  const int k = cfg.order_x;
  const int n = grid.size();
  const auto w = composed_density(params, rem, nss);
  const auto micro = micro_field(basis, rem.g);
  const SpectralHermite sg(grid, basis, rem.g);
  const SpectralHermite sm(grid, basis, micro);
  const auto a = rem.a();
  const auto b = rem.b(basis);
  ScalarField slip(n), gam(n);
  for (int j = 0; j < n; ++j) {
    slip[j] = b[j] - eps * rem.u[j];
    gam[j] = gamma_moment(basis, micro.at(j), 0, 0);
  }
  const auto ux = deriv(grid, rem.u, 1);
  const auto rx = deriv(grid, rem.rho, 1);
  const auto ax = deriv(grid, a, 1);
  const auto bx = deriv(grid, b, 1);

  MicroFunctionals f;
  double weighted_u = 0.0;
  for (int o = 0; o <= k; ++o) {
    const auto du = deriv(grid, rem.u, o);
    for (int j = 0; j < n; ++j) weighted_u += w[j] * du[j] * du[j];
  }
  f.E_K1 = sg.norm_sq(k, 0, 0, false) + weighted_u * grid.spacing() +
           params.A * params.gamma * sob(grid, rem.rho, k);
  f.E_K2 = (params.mu + (params.mu + params.lambda)) * sob(grid, ux, k - 1);
  for (int o = 1; o <= k; ++o) {
    const auto dr = deriv(grid, rem.rho, o);
    auto du = deriv(grid, rem.u, o - 1);
    for (int j = 0; j < n; ++j) du[j] *= w[j] * w[j];
    f.E_K3_cross += grid.inner(dr, du);
  }
  f.E_K3_cross *= 2.0 / params.viscosity();
  f.E_K3 = sob(grid, rx, k - 1) + f.E_K3_cross;
  if (cfg.order_v >= 1) f.E_K4 = cfg.cbar * sm.norm_sq(k - 1, cfg.order_v - 1, 1, false);
  for (int o = 0; o <= k - 1; ++o) {
    auto db = deriv(grid, bx, o);
    for (double& x : db) x *= 2.0;
    f.E_F_gamma += 2.0 * grid.inner(db, deriv(grid, gam, o));
    f.E_F_ab += eps * grid.inner(deriv(grid, a, o + 1), deriv(grid, b, o));
  }
  f.E_F = sob(grid, a, k - 1) + sob(grid, b, k - 1) + f.E_F_gamma + f.E_F_ab;

  f.D_K1_stiff = (sm.norm_sq(k, 0, 0, true) + sob(grid, slip, k)) / (eps * eps);
  f.D_K1 = f.D_K1_stiff + 2.0 * sob(grid, ux, k);
  f.D_K2 = sob(grid, du_dt, k - 1);
  f.D_K3 = sob(grid, rx, k - 1);
  if (cfg.order_v >= 1) f.D_K4 = sm.norm_sq(k - 1, cfg.order_v - 1, 1, true) / (eps * eps);
  f.D_F = 2.0 / eps * sob(grid, bx, k - 1) + sob(grid, ax, k - 1);
  return f;
}

EnergyReport evaluate_report(const Grid& grid, const VelocityBasis& basis, const DiagConfig& cfg,
                             const KineticState& kin, const NssState& nss, std::span<const double> du_dt) {
  const auto rem = extract_remainder(grid, basis, kin, nss);
  EnergyReport r;
  r.t = kin.t;
  r.macro = macro_energy(grid, kin.params, cfg, nss);
  r.micro = micro_functionals(grid, basis, kin.params, cfg, rem, nss, du_dt);
  r.E_total = energy_E(grid, basis, cfg, rem, nss);
  const auto d = dissipation_D(grid, basis, kin.params, cfg, rem, nss, du_dt);
  r.D_total = d.total;
  r.D_stiff = d.stiff;
  const auto& l = cfg.lambda;
  r.E_weighted = l[0] * r.micro.E_K1 + l[1] * r.micro.E_K2 + l[2] * r.micro.E_K3 + l[3] * r.micro.E_K4 +
                 l[4] * r.micro.E_F + l[5] * r.macro.E_ma;
  r.D_weighted = r.micro.D_K1 + r.micro.D_K2 + r.micro.D_K3 + r.micro.D_K4 + r.micro.D_F + r.macro.D_ma;
  r.totals = conserved_totals(grid, basis, kin);
  r.errors = convergence_errors(grid, basis, kin, nss);
  return r;
}

}  // namespace hydrolimit
