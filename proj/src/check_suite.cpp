#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "errors.hpp"
#include "harness.hpp"

namespace hydrolimit {

namespace {

Coeffs random_coeffs(const VelocityBasis& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Coeffs c(basis.size());
  for (auto& x : c) x = normal(rng);
  return c;
}

ScalarField random_profile(const Grid& grid, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  ScalarField f(grid.size(), 0.0);
  const double k0 = 2.0 * std::numbers::pi / grid.length();
  for (int k = 1; k <= 4; ++k) {
    const double a = uni(rng) * amp / k, b = uni(rng) * amp / k;
    for (int j = 0; j < grid.size(); ++j) {
      const double x = grid.nodes()[j];
      f[j] += a * std::cos(k * k0 * x) + b * std::sin(k * k0 * x);
    }
  }
  return f;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

double empirical_coercivity(const VelocityBasis& basis, int samples, std::uint64_t seed) {
  if (samples < 1) throw ConfigError("coercivity needs at least one sample");
  std::mt19937_64 rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const auto c = random_coeffs(basis, rng);
    best = std::min(best, coercivity_ratio(basis, c).ratio);
  }
  return best;
}

CheckReport run_check(const SimConfig& cfg) {
  cfg.validate();
  CheckReport rep;
  const VelocityBasis basis(cfg.dv, cfg.n_hermite);
  const Grid grid(cfg.nx, cfg.length);
  std::mt19937_64 rng(cfg.seed);

  for (std::size_t i = 0; i < basis.size(); ++i) {
    Coeffs e(basis.size(), 0.0);
    e[i] = 1.0;
    const auto le = apply_L(basis, e);
    for (std::size_t k = 0; k < le.size(); ++k) {
      const double expect = k == i ? basis.degree(i) : 0.0;
      rep.eigen_err = std::max(rep.eigen_err, std::abs(le[k] - expect));
    }
  }

  for (int s = 0; s < 100; ++s) {
    const auto f = random_coeffs(basis, rng);
    const auto g = random_coeffs(basis, rng);
    const auto pf = micro_part(basis, f);
    rep.idempotence_err = std::max(rep.idempotence_err, max_abs_diff(micro_part(basis, pf), pf));
    const auto pg = micro_part(basis, g);
    const double scale = std::sqrt(inner(f, f) * inner(g, g));
    rep.self_adjoint_err = std::max(rep.self_adjoint_err, std::abs(inner(pf, g) - inner(f, pg)) / scale);
    for (int axis = 0; axis < basis.dim(); ++axis) {
      const auto vf = apply_ladder(basis, f, LadderKind::MultiplyV, axis);
      const auto vg = apply_ladder(basis, g, LadderKind::MultiplyV, axis);
      rep.ladder_err = std::max(rep.ladder_err, std::abs(inner(vf, g) - inner(f, vg)) / scale);
    }
  }

  rep.c0_seed_a = empirical_coercivity(basis, 1000, cfg.seed);
  rep.c0_seed_b = empirical_coercivity(basis, 1000, cfg.seed + 1);
  rep.c0 = std::min(rep.c0_seed_a, rep.c0_seed_b);
  rep.c0_spread = std::abs(rep.c0_seed_a - rep.c0_seed_b) / std::max(rep.c0_seed_a, rep.c0_seed_b);
  rep.operators_ok = rep.eigen_err <= 1e-12 && rep.idempotence_err <= 1e-12 && rep.self_adjoint_err <= 1e-12 &&
                     rep.ladder_err <= 1e-12 && rep.c0 > 0.0 && rep.c0_spread <= 0.1;

  for (int s = 0; s < 20; ++s) {
    NssState nss = zero_nss(grid);
    nss.m0 = random_profile(grid, rng, 0.1);
    nss.u0 = random_profile(grid, rng, 0.1);
    nss.h0 = random_profile(grid, rng, 0.1);
    const auto r = hilbert_residual_steady(grid, basis, cfg.phys, nss);
    rep.r_minus1_max = std::max(rep.r_minus1_max, r.r_minus1);
  }
  rep.hilbert_ok = rep.r_minus1_max <= 1e-10;

  const auto h0 = random_profile(grid, rng, 0.1);
  const auto rho = random_profile(grid, rng, 1.0);
  const std::vector<double> eps{1e-1, std::pow(10.0, -1.5), 1e-2};
  rep.defect_ok = true;
  for (double gamma : {5.0 / 3.0, 2.0, 3.0}) {
    PhysParams p = cfg.phys;
    p.gamma = gamma;
    std::vector<double> sup;
    for (double e : eps) {
      const auto b = pressure_defect(grid, p, h0, rho, e, 0);
      sup.push_back(*std::max_element(b.begin(), b.end(), [](double x, double y) {
        return std::abs(x) < std::abs(y);
      }));
      sup.back() = std::abs(sup.back());
    }
    const double slope = fit_rate(eps, sup).slope;
    rep.defect_slopes.push_back(slope);
    rep.defect_ok = rep.defect_ok && std::abs(slope - 2.0) <= 0.1;
  }
  {
    PhysParams p = cfg.phys;
    p.gamma = 2.0;
    for (double e : eps) {
      const auto b = pressure_defect(grid, p, h0, rho, e, 0);
      for (int j = 0; j < grid.size(); ++j) {
        rep.defect_gamma2_err = std::max(rep.defect_gamma2_err, std::abs(b[j] + e * e * rho[j] * rho[j]));
      }
    }
  }
  rep.defect_ok = rep.defect_ok && rep.defect_gamma2_err <= 1e-12;

  SimConfig run = cfg;
  run.energy = true;
  const auto res = run_single(run, {});
  rep.energy_max_ratio = res.energy_max_ratio;
  rep.fitted_C = res.fitted_C;
  rep.ledger_ok = rep.energy_max_ratio <= 2.0 && rep.fitted_C > 0.0;
  return rep;
}

}  // namespace hydrolimit
