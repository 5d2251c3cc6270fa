#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "errors.hpp"
#include "expansion.hpp"
#include "kinetic_solver.hpp"

using namespace hydrolimit;

namespace {

constexpr double pi = std::numbers::pi;

KineticState random_state(const Grid& g, const VelocityBasis& b, std::mt19937_64& rng, double eps, double amp) {
  auto s = equilibrium_state(g, b, PhysParams{});
  s.params.eps = eps;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 1; k <= 3; ++k) {
    std::vector<double> ca(b.size());
    for (auto& c : ca) c = u(rng) * amp / (k * k);
    const double ru = u(rng) * amp, rr = u(rng) * amp;
    for (int j = 0; j < g.size(); ++j) {
      const double w = std::cos(k * g.nodes()[j] + 0.3 * k);
      for (std::size_t a = 0; a < b.size(); ++a) s.h(j, a) += ca[a] * w / (1.0 + b.degree(a));
      s.fluid.u[j] += ru * w;
      s.fluid.rho[j] += rr * w;
    }
  }
  return s;
}

// int f dv and int v f dv at one node by tensor quadrature.
std::pair<double, double> quadrature_moments(const VelocityBasis& b, std::span<const double> coeffs) {
  const auto vals = b.synthesize_at_nodes(coeffs);
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t p = 0; p < b.num_points(); ++p) {
    const auto v = b.point(p);
    const double w = b.point_weight(p) / std::sqrt(maxwellian(b, v));
    m0 += w * vals[p];
    m1 += w * v[0] * vals[p];
  }
  return {m0, m1};
}

}  // namespace

TEST_CASE("kinetic moments") {
  const Grid g(16, 2 * pi);
  const VelocityBasis b(1, 8);
  auto s = equilibrium_state(g, b, PhysParams{});
  auto m = kinetic_moments(b, s);
  for (int j = 0; j < g.size(); ++j) {
    CHECK(m.density[j] == 1.0);
    CHECK(m.momentum[j] == 0.0);
  }
  s.h(4, 1) = 0.3;
  m = kinetic_moments(b, s);
  CHECK(m.density[4] == 1.0);
  CHECK(m.momentum[4] == 0.3);

  std::mt19937_64 rng(1);
  const auto r = random_state(g, b, rng, 0.1, 0.5);
  m = kinetic_moments(b, r);
  for (int j = 0; j < g.size(); ++j) {
    const auto [q0, q1] = quadrature_moments(b, r.h.at(j));
    CHECK(std::abs(q0 - m.density[j]) <= 1e-12);
    CHECK(std::abs(q1 - m.momentum[j]) <= 1e-12);
  }
}

TEST_CASE("drag source") {
  const Grid g(16, 2 * pi);
  const VelocityBasis b(1, 8);
  auto s = equilibrium_state(g, b, PhysParams{});
  for (double x : drag_source(b, s)) CHECK(x == 0.0);
  s.params.eps = 0.05;
  for (int j = 0; j < g.size(); ++j) {
    s.fluid.u[j] = 0.3;
    s.h(j, 1) = 0.05 * 0.3;
  }
  for (double x : drag_source(b, s)) CHECK(std::abs(x) <= 1e-15);
  for (int j = 0; j < g.size(); ++j) {
    s.fluid.u[j] = 0.0;
    s.h(j, 1) = 0.1;
  }
  for (double x : drag_source(b, s)) CHECK(x == doctest::Approx(2.0).epsilon(1e-14));
  // quadrature of (1/eps) int (v - eps u) f dv
  std::mt19937_64 rng(2);
  const auto r = random_state(g, b, rng, 0.05, 0.4);
  const auto d = drag_source(b, r);
  for (int j = 0; j < g.size(); ++j) {
    const auto [q0, q1] = quadrature_moments(b, r.h.at(j));
    CHECK(std::abs(d[j] - (q1 - 0.05 * r.fluid.u[j] * q0) / 0.05) <= 1e-11);
  }
}

TEST_CASE("conserved totals") {
  const Grid g(16, 2 * pi);
  const VelocityBasis b(1, 8);
  auto s = equilibrium_state(g, b, PhysParams{});
  auto t = conserved_totals(g, b, s);
  CHECK(t.mass_kinetic == doctest::Approx(1.0));
  CHECK(t.mass_fluid == doctest::Approx(1.0));
  CHECK(t.momentum == 0.0);
  for (auto& u : s.fluid.u) u = 0.2;
  CHECK(conserved_totals(g, b, s).momentum == doctest::Approx(0.2));

  std::mt19937_64 rng(3);
  const auto r = random_state(g, b, rng, 0.1, 0.5);
  double mk = 0.0, mf = 0.0, p = 0.0;
  for (int j = 0; j < g.size(); ++j) {
    const auto [q0, q1] = quadrature_moments(b, r.h.at(j));
    mk += q0 / g.size();
    mf += r.fluid.rho[j] / g.size();
    p += (r.fluid.rho[j] * r.fluid.u[j] + 0.1 * q1) / g.size();
  }
  t = conserved_totals(g, b, r);
  CHECK(std::abs(t.mass_kinetic - mk) <= 1e-12);
  CHECK(std::abs(t.mass_fluid - mf) <= 1e-12);
  CHECK(std::abs(t.momentum - p) <= 1e-12);
}

TEST_CASE("equilibrium is a fixed point") {
  const Grid g(32, 2 * pi);
  const VelocityBasis b(1, 16);
  auto s = equilibrium_state(g, b, PhysParams{});
  const double dt = max_stable_dt(g, b, s.params.eps);
  const auto n = imex_step(g, b, s, dt);
  for (std::size_t i = 0; i < n.h.data.size(); ++i) CHECK(std::abs(n.h.data[i] - s.h.data[i]) <= 1e-12);
  for (int j = 0; j < g.size(); ++j) {
    CHECK(std::abs(n.fluid.rho[j] - 1.0) <= 1e-12);
    CHECK(std::abs(n.fluid.u[j]) <= 1e-12);
  }
}

TEST_CASE("exact relaxation of a micro mode") {
  const Grid g(16, 2 * pi);
  const VelocityBasis b(1, 16);
  auto s = equilibrium_state(g, b, PhysParams{});
  s.params.eps = 0.1;
  for (int j = 0; j < g.size(); ++j) {
    s.h(j, 0) = 0.0;
    s.h(j, 3) = 1e-3;
  }
  KineticOptions o;
  o.freeze_transport = true;
  for (double dt : {1e-4, 1e-3, 5e-3}) {
    auto cur = s;
    for (int n = 0; n < 5; ++n) {
      const auto next = imex_step(g, b, cur, dt, o);
      const double factor = next.h(5, 3) / cur.h(5, 3);
      CHECK(factor == doctest::Approx(std::exp(-3.0 * dt / 0.01)).epsilon(0.01));
      cur = next;
    }
  }
}

TEST_CASE("errors") {
  const Grid g(16, 2 * pi);
  const VelocityBasis b(1, 8);
  auto s = equilibrium_state(g, b, PhysParams{});
  const double limit = max_stable_dt(g, b, s.params.eps);
  CHECK_THROWS_AS(imex_step(g, b, s, 2.0 * limit), ConfigError);
  s.h(3, 2) = std::numeric_limits<double>::quiet_NaN();
  s.step = 41;
  try {
    imex_step(g, b, s, 0.5 * limit);
    FAIL("expected a divergence error");
  } catch (const DivergenceError& e) {
    CHECK(e.step() == 42);
  }
}

TEST_CASE("small-data momentum and mass bookkeeping") {
  const Grid g(64, 2 * pi);
  const VelocityBasis b(1, 32);
  PhysParams p;
  p.eps = 0.1;
  NssState nss = zero_nss(g);
  for (int j = 0; j < g.size(); ++j) {
    const double x = g.nodes()[j];
    nss.m0[j] = 0.05 * std::cos(x);
    nss.u0[j] = 0.05 * std::sin(x);
    nss.h0[j] = 0.05 * std::cos(x);
  }
  auto s = well_prepared_initial(g, b, nss, zero_remainder(g, b), p);
  const auto t0 = conserved_totals(g, b, s);
  const double dt = max_stable_dt(g, b, p.eps);
  const long steps = std::lround(std::ceil(0.5 / dt));
  for (long n = 0; n < steps; ++n) s = imex_step(g, b, s, 0.5 / steps);
  const auto t1 = conserved_totals(g, b, s);
  CHECK(std::abs(t1.mass_kinetic - t0.mass_kinetic) <= 1e-10);
  CHECK(std::abs(t1.mass_fluid - t0.mass_fluid) <= 1e-10);
  CHECK(std::abs(t1.momentum - t0.momentum) <= 0.5e-8);
}

TEST_CASE("property: two-phase masses over 1000 steps") {
  const Grid g(32, 2 * pi);
  const VelocityBasis b(1, 16);
  std::mt19937_64 rng(9);
  auto s = random_state(g, b, rng, 0.2, 0.05);
  const auto t0 = conserved_totals(g, b, s);
  const double dt = max_stable_dt(g, b, 0.2);
  for (int n = 0; n < 1000; ++n) s = imex_step(g, b, s, dt);
  const auto t1 = conserved_totals(g, b, s);
  CHECK(std::abs(t1.mass_kinetic - t0.mass_kinetic) <= 1e-10);
  CHECK(std::abs(t1.mass_fluid - t0.mass_fluid) <= 1e-10);
  CHECK(std::abs(t1.momentum - t0.momentum) <= 1e-8 * (1000 * dt));
}

TEST_CASE("property: relaxation dominance") {
  const Grid g(32, 2 * pi);
  const VelocityBasis b(1, 16);
  const double eps = 1e-2;
  auto s = equilibrium_state(g, b, PhysParams{});
  s.params.eps = eps;
  // half of the energy in micro modes
  double macro = 0.0, micro = 0.0;
  for (int j = 0; j < g.size(); ++j) {
    const double x = g.nodes()[j];
    s.h(j, 0) = 1.0 + 0.1 * std::cos(x);
    s.h(j, 2) = 0.3 * std::sin(x);
    s.h(j, 4) = 0.3 * std::cos(2 * x);
  }
  auto fraction = [&](const KineticState& k) {
    macro = micro = 0.0;
    for (int j = 0; j < g.size(); ++j) {
      for (std::size_t a = 0; a < b.size(); ++a) {
        // perturbation g = h - psi_0
        const double c = k.h(j, a) - (a == 0 ? 1.0 : 0.0);
        (b.degree(a) >= 2 ? micro : macro) += c * c;
      }
    }
    return micro / (micro + macro);
  };
  CHECK(fraction(s) > 0.5);
  const double dt = max_stable_dt(g, b, eps);
  double t = 0.0;
  while (t < 5 * eps * eps) {
    const double h = std::min(dt, 5 * eps * eps - t);
    s = imex_step(g, b, s, h);
    t += h;
  }
  CHECK(fraction(s) < 1e-3);
}
