#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "fluid_core.hpp"

using namespace hydrolimit;

namespace {

constexpr double pi = std::numbers::pi;

ScalarField profile(const Grid& g, double c, double amp, int k, bool sine = false) {
  ScalarField f(g.size());
  for (int j = 0; j < g.size(); ++j) {
    const double x = g.nodes()[j];
    f[j] = c + amp * (sine ? std::sin(k * x) : std::cos(k * x));
  }
  return f;
}

ScalarField smooth_random(const Grid& g, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g.size(), 0.0);
  for (int k = 1; k <= 4; ++k) {
    const double a = u(rng) * amp / (k * k), b = u(rng) * amp / (k * k);
    for (int j = 0; j < g.size(); ++j) f[j] += a * std::cos(k * g.nodes()[j]) + b * std::sin(k * g.nodes()[j]);
  }
  return f;
}

double first_mode_cos(const Grid& g, std::span<const double> f) { return 2.0 * g.forward(f)[1].real(); }

}  // namespace

TEST_CASE("pressure law") {
  const Grid g(32, 2 * pi);
  PhysParams p;
  const auto rho = constant_field(g, 1.5);
  for (double x : pressure(p, rho)) CHECK(x == doctest::Approx(2.25));
  for (double x : pressure_gradient(g, p, rho)) CHECK(std::abs(x) <= 1e-14);
  p.gamma = 5.0 / 3.0;
  for (double x : pressure(p, constant_field(g, 1.0))) CHECK(x == doctest::Approx(1.0));
  p.gamma = 2.0;
  const auto r = profile(g, 1.0, 0.1, 1);
  const auto dp = pressure_gradient(g, p, r);
  for (int j = 0; j < g.size(); ++j) {
    const double x = g.nodes()[j];
    CHECK(std::abs(dp[j] - 2 * (1 + 0.1 * std::cos(x)) * (-0.1 * std::sin(x))) <= 1e-10);
  }
  auto bad = constant_field(g, 1.0);
  bad[3] = 0.0;
  CHECK_THROWS_AS(pressure(p, bad), StateError);
}

TEST_CASE("Lame operator") {
  const Grid g(32, 2 * pi);
  const PhysParams p;
  const auto lu = lame_apply(g, p, profile(g, 0.0, 1.0, 1, true));
  for (int j = 0; j < g.size(); ++j) CHECK(std::abs(lu[j] - 2 * std::sin(g.nodes()[j])) <= 1e-12);
  for (double x : lame_apply(g, p, constant_field(g, 0.7))) CHECK(std::abs(x) <= 1e-14);
  std::mt19937_64 rng(1);
  for (int s = 0; s < 20; ++s) {
    const auto u = smooth_random(g, rng, 1.0);
    const double lhs = g.inner(lame_apply(g, p, u), u);
    CHECK(lhs >= 0.0);
    CHECK(lhs == doctest::Approx(p.viscosity() * g.l2_norm_sq(g.derivative(u, 1))).epsilon(1e-10));
  }
}

TEST_CASE("CNS right-hand side") {
  const Grid g(32, 2 * pi);
  const PhysParams p;
  const FluidState eq{constant_field(g, 1.0), constant_field(g, 0.0)};
  const auto r = cns_rhs(g, p, eq, constant_field(g, 0.0));
  for (int j = 0; j < g.size(); ++j) {
    CHECK(r.d_rho[j] == 0.0);
    CHECK(r.d_momentum[j] == 0.0);
  }
  std::mt19937_64 rng(3);
  for (int s = 0; s < 10; ++s) {
    const FluidState st{profile(g, 1.0, 0.0, 1), smooth_random(g, rng, 0.2)};
    auto rho = smooth_random(g, rng, 0.2);
    for (auto& x : rho) x += 1.0;
    const auto rr = cns_rhs(g, p, FluidState{rho, st.u}, smooth_random(g, rng, 0.1));
    CHECK(std::abs(g.mean(rr.d_rho)) <= 1e-12);
  }
}

TEST_CASE("acoustic frequency") {
  const Grid g(32, 2 * pi);
  PhysParams p;
  p.A = 1.0;
  p.gamma = 1.0 + 1e-12;
  p.mu = 1e-6;
  FluidState s{profile(g, 1.0, 1e-3, 1), constant_field(g, 0.0)};
  const auto zero = constant_field(g, 0.0);
  const double dt = 1e-3;
  std::vector<double> crossings;
  double prev = first_mode_cos(g, s.rho);
  double t = 0.0;
  auto add = [](const FluidState& a, const CnsRates& r, double h) {
    FluidState out = a;
    for (std::size_t j = 0; j < a.rho.size(); ++j) {
      const double q = a.rho[j] * a.u[j] + h * r.d_momentum[j];
      out.rho[j] = a.rho[j] + h * r.d_rho[j];
      out.u[j] = q / out.rho[j];
    }
    return out;
  };
  while (t < 4.0 * pi && crossings.size() < 3) {
    const auto k1 = cns_rhs(g, p, s, zero);
    const auto k2 = cns_rhs(g, p, add(s, k1, dt / 2), zero);
    const auto k3 = cns_rhs(g, p, add(s, k2, dt / 2), zero);
    const auto k4 = cns_rhs(g, p, add(s, k3, dt), zero);
    CnsRates k{ScalarField(g.size()), ScalarField(g.size())};
    for (int j = 0; j < g.size(); ++j) {
      k.d_rho[j] = (k1.d_rho[j] + 2 * k2.d_rho[j] + 2 * k3.d_rho[j] + k4.d_rho[j]) / 6;
      k.d_momentum[j] = (k1.d_momentum[j] + 2 * k2.d_momentum[j] + 2 * k3.d_momentum[j] + k4.d_momentum[j]) / 6;
    }
    s = add(s, k, dt);
    t += dt;
    const double now = first_mode_cos(g, s.rho);
    if ((prev > 0) != (now > 0)) crossings.push_back(t - dt * now / (now - prev));
    prev = now;
  }
  REQUIRE(crossings.size() >= 2);
  const double omega = pi / (crossings[1] - crossings[0]);
  CHECK(omega == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("viscous substep conserves momentum") {
  const Grid g(32, 2 * pi);
  const PhysParams p;
  std::mt19937_64 rng(8);
  auto rho = smooth_random(g, rng, 0.3);
  for (auto& x : rho) x += 1.0;
  const auto u = smooth_random(g, rng, 0.5);
  const auto v = viscous_substep(g, p, rho, u, 0.05);
  ScalarField m0(g.size()), m1(g.size());
  for (int j = 0; j < g.size(); ++j) {
    m0[j] = rho[j] * u[j];
    m1[j] = rho[j] * v[j];
  }
  CHECK(std::abs(g.mean(m1) - g.mean(m0)) <= 1e-14);
  CHECK(g.l2_norm_sq(g.derivative(v, 1)) < g.l2_norm_sq(g.derivative(u, 1)));
}

TEST_CASE("NSS step: fixed point, heat decay, means") {
  const Grid g(64, 2 * pi);
  const PhysParams p;
  const auto z = zero_nss(g);
  const auto z1 = nss_step(g, p, z, 1e-2);
  for (int j = 0; j < g.size(); ++j) {
    CHECK(z1.m0[j] == 0.0);
    CHECK(z1.u0[j] == 0.0);
    CHECK(z1.h0[j] == 0.0);
  }

  NssState s = z;
  s.m0 = profile(g, 0.0, 0.1, 1);
  NssOptions frozen;
  frozen.freeze_velocity = true;
  for (int n = 0; n < 1000; ++n) s = nss_step(g, p, s, 1e-3, frozen);
  CHECK(first_mode_cos(g, s.m0) == doctest::Approx(0.1 * std::exp(-1.0)).epsilon(0.02));

  std::mt19937_64 rng(5);
  NssState r{smooth_random(g, rng, 0.1), smooth_random(g, rng, 0.1), smooth_random(g, rng, 0.1)};
  for (int n = 0; n < 20; ++n) {
    const auto next = nss_step(g, p, r, 1e-3);
    CHECK(std::abs(g.mean(next.m0) - g.mean(r.m0)) <= 1e-12);
    CHECK(std::abs(g.mean(next.h0) - g.mean(r.h0)) <= 1e-12);
    r = next;
  }

  NssState bad = z;
  bad.h0[2] = -1.5;
  CHECK_THROWS_AS(nss_step(g, p, bad, 1e-3), StateError);
}

TEST_CASE("property: NSS mass conservation over a run") {
  const Grid g(64, 2 * pi);
  const PhysParams p;
  std::mt19937_64 rng(6);
  NssState s{smooth_random(g, rng, 0.1), smooth_random(g, rng, 0.1), smooth_random(g, rng, 0.1)};
  const double m = g.mean(s.m0), h = g.mean(s.h0);
  for (int n = 0; n < 500; ++n) s = nss_step(g, p, s, 1e-3);
  CHECK(std::abs(g.mean(s.m0) - m) <= 1e-10);
  CHECK(std::abs(g.mean(s.h0) - h) <= 1e-10);
}

TEST_CASE("property: equilibrium stability") {
  const Grid g(64, 2 * pi);
  const PhysParams p;
  std::mt19937_64 rng(7);
  NssState s{smooth_random(g, rng, 1e-15), smooth_random(g, rng, 1e-15), smooth_random(g, rng, 1e-15)};
  for (int n = 0; n < 1000; ++n) s = nss_step(g, p, s, 1e-3);
  CHECK(g.max_abs(s.m0) <= 1e-8);
  CHECK(g.max_abs(s.u0) <= 1e-8);
  CHECK(g.max_abs(s.h0) <= 1e-8);
}

TEST_CASE("property: macro energy is non-increasing for small data") {
  const Grid g(64, 2 * pi);
  const PhysParams p;
  const DiagConfig cfg;
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    std::mt19937_64 rng(seed);
    NssState s{smooth_random(g, rng, 2e-3), smooth_random(g, rng, 2e-3), smooth_random(g, rng, 2e-3)};
    const double e0 = macro_energy(g, p, cfg, s).E_ma;
    double prev = e0;
    double worst = -1.0;
    for (int n = 0; n < 500; ++n) {
      s = nss_step(g, p, s, 1e-3);
      const double e = macro_energy(g, p, cfg, s).E_ma;
      worst = std::max(worst, e - prev);
      prev = e;
    }
    CHECK(worst <= 1e-8 * e0);
  }
}
