#include <cmath>
#include <random>

#include "doctest.h"
#include "dnls/errors.hpp"
#include "dnls/field.hpp"
#include "dnls/profiles.hpp"
#include "oracles.hpp"

using namespace dnls;

namespace {

ComplexField random_field(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexField v(g);
  const double a = n(rng), b = n(rng), c = 0.5 + std::abs(n(rng));
  for (int j = 0; j < g.n(); ++j) {
    const double x = g.x(j);
    v[j] = cplx(a + std::sin(3.0 * x), b * x) * std::exp(-c * x * x);
  }
  return v;
}

double max_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (int j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace

TEST_CASE("profile values at the origin") {
  const Grid g(20.0, 2001);
  CHECK(standing_wave_profile({1.0, 0.0}, g)[0].real() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(standing_wave_profile({1.0, -0.5}, g)[0].real() ==
        doctest::Approx(2.0 * std::sqrt(std::sqrt(3.0) / 2.0)).epsilon(1e-14));
  CHECK(standing_wave_profile({1.0, -0.5}, g)[0].real() == doctest::Approx(oracle::kAttractive.phi0).epsilon(1e-14));
  CHECK(standing_wave_profile({4.0, 0.0}, g)[0].real() == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(standing_wave_profile({1.0, 0.5}, g)[0].imag() == 0.0);
}

TEST_CASE("profile needs omega > alpha^2") {
  const Grid g(20.0, 201);
  CHECK_THROWS_AS(standing_wave_profile({0.2, 0.5}, g), AdmissibilityError);
  CHECK_THROWS_AS(standing_wave_profile({0.25, 0.5}, g), AdmissibilityError);
  CHECK_THROWS_AS(standing_wave_profile({1.0, -1.0}, g), AdmissibilityError);
  CHECK_NOTHROW(standing_wave_profile({0.26, 0.5}, g));
}

TEST_CASE("profile matches the analytic formula and derivative") {
  for (const auto& o : {oracle::kFlat, oracle::kAttractive, oracle::kRepulsive, oracle::kDoubleOmega}) {
    const WaveParams p{o.omega, o.alpha};
    const Grid g(20.0, 401);
    const auto phi = standing_wave_profile(p, g);
    const auto dphi = standing_wave_derivative(p, g);
    for (int j = 0; j < g.n(); j += 7) {
      CHECK(phi[j].real() == doctest::Approx(oracle::phi(o.omega, o.alpha, g.x(j))).epsilon(1e-13));
      CHECK(std::abs(dphi[j].real() - oracle::dphi(o.omega, o.alpha, g.x(j))) < 1e-13);
    }
  }
}

TEST_CASE("profile residual at h = 0.01 and its second-order decrease") {
  for (double alpha : {0.0, 0.5, -0.5}) {
    const WaveParams p{1.0, alpha};
    const auto coarse = profile_residual(standing_wave_profile(p, Grid(20.0, 2001)), p);
    const auto fine = profile_residual(standing_wave_profile(p, Grid(20.0, 4001)), p);
    CHECK(coarse.ode_sup <= 5e-4);
    CHECK(coarse.ode_sup / fine.ode_sup == doctest::Approx(4.0).epsilon(0.05));
    const auto exact_bc = profile_residual(standing_wave_profile(p, Grid(20.0, 2001)), p, BoundaryDerivative::analytic);
    CHECK(exact_bc.bc_err <= 1e-12);
    CHECK(coarse.bc_err <= 1e-6);
  }
}

TEST_CASE("analytic boundary residual does not depend on the grid") {
  const WaveParams p{2.0, 1.0};
  for (int n : {5, 101, 2001}) {
    const auto r = profile_residual(standing_wave_profile(p, Grid(20.0, n)), p, BoundaryDerivative::analytic);
    CHECK(r.bc_err <= 1e-12);
  }
}

TEST_CASE("constant field is not a solution") {
  const WaveParams p{1.0, 0.0};
  const Grid g(5.0, 101);
  const double c = 0.8;
  const ComplexField v(g, std::vector<cplx>(g.n(), c));
  const auto r = profile_residual(v, p);
  CHECK(r.ode_sup == doctest::Approx(std::abs(-p.omega * c + 3.0 / 16.0 * std::pow(c, 5))).epsilon(1e-12));
  CHECK(r.ode_sup > 0.0);
}

TEST_CASE("scaling law at alpha = 0") {
  const Grid g(20.0, 2001);
  const auto base = standing_wave_profile({1.0, 0.0}, g);
  const auto four = standing_wave_profile({4.0, 0.0}, g);
  // sqrt(4) x_j = x_{2j} on the same grid.
  for (int j = 0; 2 * j < g.n(); ++j) {
    CHECK(std::abs(four[j] - std::pow(4.0, 0.25) * base[2 * j]) <= 1e-10);
  }
}

TEST_CASE("profile positivity, eventual decrease and exponential tail") {
  for (double omega : {0.5, 1.0, 2.0}) {
    for (double alpha : {-0.6, -0.2, 0.0, 0.2, 0.6}) {
      const WaveParams p{omega, alpha};
      if (!p.admissible()) continue;
      const Grid g(20.0, 2001);
      const auto phi = standing_wave_profile(p, g);
      const double theta0 = profile_shift(p);
      const double x_peak = std::max(0.0, -theta0 / (2.0 * std::sqrt(omega)));
      bool positive = true;
      bool decreasing = true;
      double tail_ratio = 0.0;
      for (int j = 0; j < g.n(); ++j) {
        const double x = g.x(j);
        positive = positive && phi[j].real() > 0.0;
        if (x > x_peak && j + 1 < g.n()) decreasing = decreasing && phi[j + 1].real() < phi[j].real();
        if (x >= 1.0) {
          const double bound = 2.0 * std::pow(omega, 0.25) * std::sqrt(2.0) * std::exp(-std::sqrt(omega) * x);
          tail_ratio = std::max(tail_ratio, phi[j].real() / bound);
        }
      }
      CHECK(positive);
      CHECK(decreasing);
      // sech(t) < 2 e^{-t} is sharp as t grows; a negative shift adds exp(-theta0 / 2).
      CHECK(tail_ratio <= std::exp(std::max(0.0, -theta0 / 2.0)) * (1.0 + 1e-12));
      if (alpha <= 0.0) CHECK(tail_ratio <= 1.0 + 1e-12);
      if (alpha > 0.0) CHECK(tail_ratio > 1.0);
    }
  }
}

TEST_CASE("gauge transforms: zero field, modulus, inverse composition") {
  const Grid g(10.0, 1001);
  const ComplexField zero(g);
  CHECK(max_diff(gauge_quarter(zero), zero) == 0.0);
  CHECK(max_diff(gauge_three_quarter(zero), zero) == 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto v = random_field(g, seed);
    const auto u = gauge_quarter(v);
    const auto w = gauge_three_quarter(v);
    for (int j = 0; j < g.n(); ++j) {
      CHECK(std::abs(std::abs(u[j]) - std::abs(v[j])) <= 1e-14 * (1.0 + std::abs(v[j])));
      CHECK(std::abs(std::abs(w[j]) - std::abs(v[j])) <= 1e-14 * (1.0 + std::abs(v[j])));
    }
    CHECK(max_diff(gauge_quarter(u, GaugeDirection::inverse), v) <= 1e-12);
    CHECK(max_diff(gauge_three_quarter(w, GaugeDirection::inverse), v) <= 1e-12);
  }
}

TEST_CASE("gauge phases follow the tail integral of |v|^2") {
  const Grid g(10.0, 1001);
  const auto v = random_field(g, 11);
  std::vector<double> dens(g.n());
  for (int j = 0; j < g.n(); ++j) dens[j] = std::norm(v[j]);
  const auto tail = tail_integral(g, dens);
  const auto u = gauge_quarter(v);
  const auto w = gauge_three_quarter(v);
  for (int j = 0; j < g.n(); j += 50) {
    CHECK(std::abs(u[j] - v[j] * std::exp(cplx(0.0, -0.25 * tail[j]))) <= 1e-13);
    CHECK(std::abs(w[j] - v[j] * std::exp(cplx(0.0, -0.75 * tail[j]))) <= 1e-13);
  }
}

TEST_CASE("gauges preserve moduli-based norms") {
  const Grid g(10.0, 1001);
  const auto v = random_field(g, 3);
  const Norms a = norms(v);
  for (const auto& u : {gauge_quarter(v), gauge_three_quarter(v)}) {
    const Norms b = norms(u);
    CHECK(b.l2sq == doctest::Approx(a.l2sq).epsilon(1e-14));
    CHECK(b.l6pow6 == doctest::Approx(a.l6pow6).epsilon(1e-14));
    CHECK(b.xmoment2 == doctest::Approx(a.xmoment2).epsilon(1e-14));
    CHECK(b.trace0sq == doctest::Approx(a.trace0sq).epsilon(1e-14));
  }
}

TEST_CASE("even extension of the attractive profile") {
  const WaveParams p{1.0, -0.5};
  const Grid g(20.0, 2001);
  const auto v = standing_wave_profile(p, g);
  const auto w = even_extension(v);
  REQUIRE(w.size() == 2 * g.n() - 1);
  CHECK(w.grid().origin() == doctest::Approx(-20.0));
  const int c = g.n() - 1;
  CHECK(w[c] == v[0]);
  for (int k = 0; k < g.n(); k += 37) {
    CHECK(w[c + k] == v[k]);
    CHECK(w[c - k] == v[k]);
    CHECK(w[c - k].real() == doctest::Approx(oracle::phi(1.0, -0.5, std::abs(w.grid().x(c - k)))).epsilon(1e-13));
  }
  CHECK(norms(w).l2sq == doctest::Approx(2.0 * norms(v).l2sq).epsilon(1e-12));
}

TEST_CASE("initial data flags") {
  const Grid g(20.0, 2001);
  const WaveParams p{1.0, 0.5};
  const auto phi = make_initial_data(standing_wave_profile(p, g), p.alpha);
  CHECK(phi.robin_compatible);
  CHECK(phi.finite_variance);
  ComplexField gauss(g);
  for (int j = 0; j < g.n(); ++j) gauss[j] = std::exp(-g.x(j) * g.x(j));
  const auto bad = make_initial_data(gauss, 1.0);
  CHECK_FALSE(bad.robin_compatible);
  CHECK(bad.finite_variance);
  CHECK(make_initial_data(gauss, 0.0).robin_compatible);
}
