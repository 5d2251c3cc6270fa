#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "harness.hpp"

using namespace hydrolimit;

namespace {

constexpr double pi = std::numbers::pi;

ScalarField smooth_random(const Grid& g, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g.size(), 0.0);
  for (int k = 1; k <= 4; ++k) {
    const double a = u(rng) * amp / (k * k), b = u(rng) * amp / (k * k);
    for (int j = 0; j < g.size(); ++j) f[j] += a * std::cos(k * g.nodes()[j]) + b * std::sin(k * g.nodes()[j]);
  }
  return f;
}

RemainderState random_remainder(const Grid& g, const VelocityBasis& b, std::mt19937_64& rng, double amp) {
  auto r = zero_remainder(g, b);
  for (std::size_t a = 0; a < b.size(); ++a) {
    const auto c = smooth_random(g, rng, amp / (1.0 + b.degree(a) * b.degree(a)));
    r.g.set_component(a, c);
  }
  r.u = smooth_random(g, rng, amp);
  r.rho = smooth_random(g, rng, amp);
  return r;
}

DiagConfig caps(int kx, int kv) {
  DiagConfig c;
  c.order_x = kx;
  c.order_v = kv;
  return c;
}

double sup(std::span<const double> f) {
  double m = 0.0;
  for (double x : f) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("config validation") {
  DiagConfig c;
  CHECK_NOTHROW(c.validate());
  c.order_x = 7;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = DiagConfig{};
  c.lambda[2] = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = DiagConfig{};
  CHECK(c.macro_m_order() == 6);
  CHECK(c.macro_u_order() == 5);
}

TEST_CASE("energy functional") {
  const Grid g(32, 2 * pi);
  const VelocityBasis b(1, 8);
  const DiagConfig cfg;
  const auto z = zero_remainder(g, b);
  CHECK(energy_E(g, b, cfg, z, zero_nss(g)) == 0.0);

  auto r = zero_remainder(g, b);
  for (int j = 0; j < g.size(); ++j) r.g(j, 2) = 1.0;
  CHECK(energy_E(g, b, caps(0, 0), r, zero_nss(g)) == doctest::Approx(2 * pi).epsilon(1e-12));

  std::mt19937_64 rng(1);
  r = random_remainder(g, b, rng, 0.3);
  auto only_g = zero_remainder(g, b);
  only_g.g = r.g;
  auto doubled = only_g;
  for (auto& x : doubled.g.data) x *= 2.0;
  CHECK(energy_E(g, b, cfg, doubled, zero_nss(g)) ==
        doctest::Approx(4.0 * energy_E(g, b, cfg, only_g, zero_nss(g))).epsilon(1e-12));
}

TEST_CASE("dissipation functional") {
  const Grid g(32, 2 * pi);
  const VelocityBasis b(1, 8);
  PhysParams p;
  p.eps = 0.1;

  // kernel of the stiff block
  auto r = zero_remainder(g, b);
  for (int j = 0; j < g.size(); ++j) {
    r.g(j, 0) = 0.4;
    r.u[j] = 0.3;
    r.g(j, 1) = p.eps * 0.3;
  }
  const auto d0 = dissipation_D(g, b, p, DiagConfig{}, r, zero_nss(g));
  CHECK(std::abs(d0.stiff) <= 1e-20);
  CHECK(std::abs(d0.total) <= 1e-20);

  auto s = zero_remainder(g, b);
  for (int j = 0; j < g.size(); ++j) s.g(j, 2) = 1.0;
  Coeffs psi2(b.size(), 0.0);
  psi2[2] = 1.0;
  const auto d = dissipation_D(g, b, p, caps(0, 0), s, zero_nss(g));
  CHECK(d.stiff == doctest::Approx(nu_norm_sq(b, psi2) * 2 * pi / (p.eps * p.eps)).epsilon(1e-12));

  std::mt19937_64 rng(2);
  const auto rr = random_remainder(g, b, rng, 0.2);
  auto fixed = rr;
  for (int j = 0; j < g.size(); ++j) fixed.u[j] = 0.0;
  const double s1 = dissipation_D(g, b, p, DiagConfig{}, fixed, zero_nss(g)).stiff;
  p.eps = 0.05;
  const double s2 = dissipation_D(g, b, p, DiagConfig{}, fixed, zero_nss(g)).stiff;
  CHECK(s2 == doctest::Approx(4.0 * s1).epsilon(1e-13));

  p.eps = 0.0;
  CHECK_THROWS_AS(dissipation_D(g, b, p, DiagConfig{}, fixed, zero_nss(g)), DomainError);
}

TEST_CASE("property: stiff block vanishes only on its kernel") {
  const Grid g(16, 2 * pi);
  const VelocityBasis b(1, 8);
  PhysParams p;
  p.eps = 0.2;
  std::mt19937_64 rng(3);
  for (int s = 0; s < 20; ++s) {
    auto r = random_remainder(g, b, rng, 0.5);
    CHECK(dissipation_D(g, b, p, DiagConfig{}, r, zero_nss(g)).stiff > 0.0);
    for (int j = 0; j < g.size(); ++j) {
      for (std::size_t a = 2; a < b.size(); ++a) r.g(j, a) = 0.0;
      r.g(j, 1) = p.eps * r.u[j];
    }
    CHECK(dissipation_D(g, b, p, DiagConfig{}, r, zero_nss(g)).stiff <= 1e-24);
  }
}

TEST_CASE("macro energy") {
  const Grid g(64, 2 * pi);
  const PhysParams p;
  const DiagConfig cfg;
  const auto eq = macro_energy(g, p, cfg, zero_nss(g));
  CHECK(eq.E_ma == 0.0);
  CHECK(eq.D_ma == 0.0);
  CHECK(eq.baseline == doctest::Approx(2.0 * p.A / (p.gamma - 1.0) * 2 * pi));

  // m0 = delta cos x: top-order, weighted and K1 blocks each contribute delta^2 pi
  const double delta = 0.03;
  NssState s = zero_nss(g);
  for (int j = 0; j < g.size(); ++j) s.m0[j] = delta * std::cos(g.nodes()[j]);
  const double blocks = 1.0 + cfg.macro_u_order() + 1.0;
  CHECK(std::abs(macro_energy(g, p, cfg, s).E_ma - blocks * delta * delta * pi) <= 1e-10);

  std::mt19937_64 rng(5);
  NssState u = zero_nss(g);
  u.u0 = smooth_random(g, rng, 0.1);
  NssState u2 = u;
  for (auto& x : u2.u0) x *= 2.0;
  CHECK(macro_energy(g, p, cfg, u2).E_ma == doctest::Approx(4.0 * macro_energy(g, p, cfg, u).E_ma).epsilon(1e-12));

  NssState bad = zero_nss(g);
  bad.h0[1] = -1.0;
  CHECK_THROWS_AS(macro_energy(g, p, cfg, bad), StateError);
}

TEST_CASE("micro functionals") {
  const Grid g(32, 2 * pi);
  const VelocityBasis b(1, 8);
  PhysParams p;
  p.eps = 0.1;
  const DiagConfig cfg;
  const auto z = micro_functionals(g, b, p, cfg, zero_remainder(g, b), zero_nss(g));
  for (double x : {z.E_K1, z.E_K2, z.E_K3, z.E_K4, z.E_F, z.D_K1, z.D_K2, z.D_K3, z.D_K4, z.D_F}) CHECK(x == 0.0);

  auto r = zero_remainder(g, b);
  for (int j = 0; j < g.size(); ++j) r.g(j, 1) = 0.2 * std::sin(g.nodes()[j]);
  CHECK(micro_functionals(g, b, p, cfg, r, zero_nss(g)).E_F_gamma == 0.0);

  auto m = zero_remainder(g, b);
  for (int j = 0; j < g.size(); ++j) m.g(j, 2) = 1.0;
  for (int k : {0, 2, 4}) {
    // D_K1 carries x derivatives only
    CHECK(micro_functionals(g, b, p, caps(k, 1), m, zero_nss(g)).D_K1_stiff ==
          doctest::Approx(dissipation_D(g, b, p, caps(k, 0), m, zero_nss(g)).stiff).epsilon(1e-13));
  }
  CHECK(micro_functionals(g, b, p, caps(2, 1), m, zero_nss(g)).D_K4 > 0.0);
  CHECK(micro_functionals(g, b, p, caps(2, 0), m, zero_nss(g)).D_K4 == 0.0);

  std::mt19937_64 rng(6);
  const auto rr = random_remainder(g, b, rng, 0.2);
  const auto f = micro_functionals(g, b, p, cfg, rr, zero_nss(g));
  for (double x : {f.E_K1, f.E_K2, f.E_K4, f.D_K1, f.D_K3, f.D_K4, f.D_F}) CHECK(x >= 0.0);
  p.eps = 0.0;
  CHECK_THROWS_AS(micro_functionals(g, b, p, cfg, rr, zero_nss(g)), DomainError);
}

TEST_CASE("property: functional equivalence") {
  const Grid g(32, 2 * pi);
  const VelocityBasis b(1, 8);
  PhysParams p;
  p.eps = 0.1;
  const DiagConfig cfg;
  std::mt19937_64 rng(7);
  double lo = 1e300, hi = 0.0;
  for (int s = 0; s < 100; ++s) {
    const auto rem = random_remainder(g, b, rng, 0.2);
    const NssState nss{smooth_random(g, rng, 0.05), smooth_random(g, rng, 0.05), smooth_random(g, rng, 0.05)};
    const auto kin = compose_expansion(g, b, nss, rem, p);
    const auto rep = evaluate_report(g, b, cfg, kin, nss);
    const double ratio = rep.E_total / rep.E_weighted;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  MESSAGE("E / weighted sum over 100 states in [" << lo << ", " << hi << "]");
  const double cbar = std::max(hi, 1.0 / lo);
  CHECK(lo > 0.0);
  CHECK(std::isfinite(hi));
  CHECK(cbar <= 10.0);
}

TEST_CASE("pressure remainder at gamma 2") {
  const Grid g(64, 2 * pi);
  PhysParams p;
  p.gamma = 2.0;
  p.A = 1.3;
  p.eps = 0.07;
  std::mt19937_64 rng(8);
  const auto h0 = smooth_random(g, rng, 0.2);
  const auto rho = smooth_random(g, rng, 0.5);
  const auto r2 = pressure_remainder(g, p, h0, rho);
  ScalarField q(g.size());
  for (int j = 0; j < g.size(); ++j) q[j] = 2 * (1 + h0[j]) * p.eps * rho[j] + p.eps * p.eps * rho[j] * rho[j];
  const auto dq = g.derivative(q, 1);
  for (int j = 0; j < g.size(); ++j) CHECK(std::abs(r2[j] + p.A * dq[j]) <= 1e-12);
}

TEST_CASE("pressure defect") {
  const Grid g(64, 2 * pi);
  PhysParams p;
  std::mt19937_64 rng(9);
  const auto h0 = smooth_random(g, rng, 0.2);
  const auto rho = smooth_random(g, rng, 0.5);

  p.gamma = 2.0;
  const auto b2 = pressure_defect(g, p, h0, rho, 0.1, 0);
  for (int j = 0; j < g.size(); ++j) CHECK(std::abs(b2[j] + 0.01 * rho[j] * rho[j]) <= 1e-12);

  for (double gam : {5.0 / 3.0, 2.0, 3.0}) {
    p.gamma = gam;
    for (int a = 0; a <= 4; ++a) CHECK(sup(pressure_defect(g, p, h0, rho, 0.0, a)) == 0.0);
  }

  p.gamma = 5.0 / 3.0;
  ScalarField c(g.size()), zero(g.size(), 0.0);
  for (int j = 0; j < g.size(); ++j) c[j] = std::cos(g.nodes()[j]);
  const double e1 = sup(pressure_defect(g, p, zero, c, 0.1, 0));
  const double e2 = sup(pressure_defect(g, p, zero, c, 0.05, 0));
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));

  CHECK_THROWS_AS(pressure_defect(g, p, zero, c, 0.1, 5), ConfigError);
  ScalarField neg(g.size(), -2.0);
  CHECK_THROWS_AS(pressure_defect(g, p, zero, neg, 1.0, 0), StateError);
}

TEST_CASE("property: pressure defect scaling") {
  const Grid g(64, 2 * pi);
  PhysParams p;
  const std::vector<double> eps{1e-1, std::pow(10.0, -1.5), 1e-2};
  std::mt19937_64 rng(10);
  for (double gam : {5.0 / 3.0, 2.0, 3.0}) {
    p.gamma = gam;
    for (int s = 0; s < 10; ++s) {
      const auto h0 = smooth_random(g, rng, 0.2);
      const auto rho = smooth_random(g, rng, 0.5);
      for (int a = 0; a <= 2; ++a) {
        std::vector<double> err;
        for (double e : eps) err.push_back(sup(pressure_defect(g, p, h0, rho, e, a)));
        const double slope = fit_rate(eps, err).slope;
        if (a == 0) {
          CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
        } else {
          CHECK(slope >= 0.9);
        }
      }
    }
  }
}

TEST_CASE("residuals at equilibrium") {
  const Grid g(32, 2 * pi);
  const VelocityBasis b(1, 8);
  PhysParams p;
  p.eps = 0.1;
  const auto z = zero_remainder(g, b);
  const RemainderPair pair{z, z, zero_nss(g), zero_nss(g), 1e-3};
  const auto r = remainder_residual(g, b, p, pair);
  CHECK(r.res_g == 0.0);
  CHECK(r.res_u == 0.0);
  CHECK(r.res_rho == 0.0);
  const auto a = ab_residual(g, b, p, pair);
  CHECK(a.res_cont == 0.0);
  CHECK(a.res_mom == 0.0);
  CHECK(a.res_stress == 0.0);
  p.eps = 0.0;
  CHECK_THROWS_AS(remainder_residual(g, b, p, pair), DomainError);
  CHECK_THROWS_AS(ab_residual(g, b, p, pair), DomainError);
}

TEST_CASE("a-b continuity residual") {
  const Grid g(32, 2 * pi);
  const VelocityBasis b(1, 8);
  PhysParams p;
  p.eps = 0.1;
  auto r = zero_remainder(g, b);
  for (int j = 0; j < g.size(); ++j) r.g(j, 1) = 0.2 * std::sin(g.nodes()[j]);
  const RemainderPair pair{r, r, zero_nss(g), zero_nss(g), 1e-3};
  ScalarField bx(g.size());
  for (int j = 0; j < g.size(); ++j) bx[j] = 0.2 * std::cos(g.nodes()[j]);
  CHECK(ab_residual(g, b, p, pair).res_cont == doctest::Approx(field_l2(g, bx)).epsilon(1e-12));
}

TEST_CASE("residuals shrink under dt refinement") {
  auto cfg = default_config();
  cfg.phys.eps = 0.1;
  cfg.t_final = 0.05;
  const double dt = effective_dt(cfg, 0.1);
  const auto coarse = residual_study(cfg, dt);
  const auto fine = residual_study(cfg, dt / 2);
  CHECK(coarse.remainder.res_g / fine.remainder.res_g >= 1.7);
  CHECK(coarse.remainder.res_u / fine.remainder.res_u >= 1.7);
  CHECK(coarse.remainder.res_rho / fine.remainder.res_rho >= 1.7);
  CHECK(coarse.ab.res_cont / fine.ab.res_cont >= 1.7);
  CHECK(coarse.ab.res_mom / fine.ab.res_mom >= 1.7);
  CHECK(coarse.ab.res_stress / fine.ab.res_stress >= 1.7);
}
