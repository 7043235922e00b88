#include <cmath>
#include <random>

#include "doctest.h"
#include "dnls/errors.hpp"
#include "dnls/functionals.hpp"
#include "dnls/groundstate.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace dnls;

namespace {

const Grid kDesk(20.0, 2001);

double h1_distance(const ComplexField& a, const ComplexField& b) { return std::sqrt(norms(a - b).h1sq); }

MinimizeConfig config(WaveParams p, MinimizeMode mode = MinimizeMode::halfline) {
  MinimizeConfig cfg;
  cfg.params = p;
  cfg.mode = mode;
  cfg.grid = kDesk;
  cfg.max_iters = 5000;
  return cfg;
}

std::vector<cplx> random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> v(n);
  for (int j = 0; j < n; ++j) {
    const double env = std::exp(-0.02 * j);
    v[j] = env * cplx(1.0 + 0.3 * u(rng), 0.3 * u(rng));
  }
  return v;
}

}  // namespace

TEST_CASE("half-line ground state at (1, 0)") {
  const auto r = minimize(config({1.0, 0.0}));
  CHECK(std::abs(r.value - oracle::pi / 2.0) < 1e-4);
  CHECK(h1_distance(r.minimizer, standing_wave_profile({1.0, 0.0}, kDesk)) < 1e-3);
  CHECK(r.residual <= 1e-8);
  CHECK(r.value > 0.0);
}

TEST_CASE("half-line ground state at (1, -0.5) is the explicit profile") {
  const WaveParams p{1.0, -0.5};
  const auto r = minimize(config(p));
  const double d = d_ref(p, kDesk);
  CHECK(std::abs(r.value - d) / d < 1e-4);
  CHECK(h1_distance(r.minimizer, standing_wave_profile(p, kDesk)) < 1e-3);
  const auto parts = DiscreteAction::halfline(kDesk, p).parts(r.minimizer.values());
  CHECK(std::abs(parts.K) <= 1e-10 * parts.L);
  CHECK(std::abs(parts.K) <= 1e-8 * parts.L);
  for (int j = 0; j < kDesk.n(); ++j) REQUIRE(std::abs(r.minimizer[j].imag()) < 1e-12);
}

TEST_CASE("discrete gradient agrees with central differences of the discrete action") {
  for (const WaveParams p : {WaveParams{1.0, -0.5}, WaveParams{1.0, 0.5}}) {
    const Grid g(20.0, 201);
    const auto half = DiscreteAction::halfline(g, p);
    const auto line = DiscreteAction::line(even_extension(ComplexField(g)).grid(), p);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      for (const DiscreteAction* act : {&half, &line}) {
        const int n = act->grid().n();
        const auto v = random_vector(n, seed);
        const auto grad = act->gradient(v);
        const auto dir = random_vector(n, seed + 100);
        const double exact = act->inner(grad, dir);
        const double eps = 1e-5;
        auto shifted = [&](double t) {
          std::vector<cplx> w(v);
          for (int j = 0; j < n; ++j) w[j] += t * dir[j];
          return act->action(w);
        };
        const double fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
        CHECK(std::abs(fd - exact) / std::abs(exact) <= 1e-6);
      }
    }
  }
}

TEST_CASE("stationary starts") {
  const WaveParams p{1.0, -0.5};
  auto cfg = config(p);
  const auto base = minimize(cfg);

  // The discrete minimizer is stationary for the discrete action.
  cfg.initial = base.minimizer;
  const auto again = minimize(cfg);
  CHECK(again.iterations <= 5);
  CHECK(again.residual <= cfg.tol);

  // The closed-form profile is stationary only up to O(h^2).
  cfg.initial = standing_wave_profile(p, kDesk);
  const auto exact = minimize(cfg);
  CHECK(exact.residual <= cfg.tol);
  CHECK(exact.iterations <= 25);
  cfg.tol = 1e-3;
  CHECK(minimize(cfg).iterations <= 5);
}

TEST_CASE("accepted iterates never increase the discrete action") {
  auto cfg = config({1.0, 0.5});
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 12; ++k) {
    cfg.max_iters = k;
    double value = 0.0;
    try {
      value = minimize(cfg).discrete_value;
    } catch (const ConvergenceError& e) {
      value = e.last().discrete_value;
      CHECK(e.last().iterations == k);
    }
    CHECK(value <= last + 1e-14 * std::abs(value));
    last = value;
  }
}

TEST_CASE("phase of the initialization only rotates the minimizer") {
  const WaveParams p{1.0, 0.5};
  auto cfg = config(p);
  ComplexField gauss(kDesk);
  for (int j = 0; j < kDesk.n(); ++j) gauss[j] = 2.0 * std::exp(-kDesk.x(j) * kDesk.x(j));
  cfg.initial = gauss;
  const auto a = minimize(cfg);
  for (double theta : {0.4, 2.0, -2.9}) {
    cfg.initial = std::exp(cplx(0.0, theta)) * gauss;
    const auto b = minimize(cfg);
    double m = 0.0;
    for (int j = 0; j < kDesk.n(); ++j) m = std::max(m, std::abs(a.minimizer[j] - b.minimizer[j]));
    CHECK(m <= 1e-8);
  }
}

TEST_CASE("seeded noise is reproducible and converges to the same state") {
  const WaveParams p{1.0, -0.5};
  auto cfg = config(p);
  cfg.noise = 0.3;
  cfg.seed = 42;
  const auto a = minimize(cfg);
  const auto b = minimize(cfg);
  CHECK(a.iterations == b.iterations);
  for (int j = 0; j < kDesk.n(); ++j) REQUIRE(a.minimizer[j] == b.minimizer[j]);
  CHECK(h1_distance(a.minimizer, standing_wave_profile(p, kDesk)) < 1e-3);
}

TEST_CASE("d_ref anchors and positivity") {
  CHECK(std::abs(d_ref({1.0, 0.0}, kDesk) - oracle::pi / 2.0) < 1e-8);
  const double fine = d_ref({1.0, -0.5}, Grid(20.0, 100001));
  CHECK(fine == doctest::Approx(oracle::kAttractive.S).epsilon(1e-10));
  CHECK(std::abs(d_ref({1.0, -0.5}, kDesk) - fine) / fine < 1e-6);
  for (double omega : {0.3, 1.0, 3.0}) {
    for (double a : {-0.9, -0.3, 0.0, 0.3, 0.9}) {
      const WaveParams p{omega, a * std::sqrt(omega)};
      CHECK(d_ref(p, kDesk) > 0.0);
    }
  }
  CHECK_THROWS_AS(d_ref({0.2, 0.5}, kDesk), AdmissibilityError);
}

TEST_CASE("mass of the profile increases with omega") {
  double last = 0.0;
  for (double omega : {0.5, 1.0, 2.0}) {
    const double m = norms(standing_wave_profile({omega, -0.5}, kDesk)).l2sq;
    CHECK(m > last);
    last = m;
  }
}

TEST_CASE("half-line and even line levels differ by a factor two") {
  const auto flat = halfline_line_relation({1.0, 0.0}, kDesk);
  CHECK(std::abs(flat.d - oracle::pi / 2.0) < 1e-3);
  CHECK(std::abs(flat.d_tilde - oracle::pi) < 1e-3);
  for (const WaveParams p : {WaveParams{1.0, -0.5}, WaveParams{1.0, 0.5}}) {
    const auto rel = halfline_line_relation(p, kDesk);
    CHECK(std::abs(rel.ratio - 2.0) < 1e-2);
  }
}

TEST_CASE("line mode keeps the iterate even") {
  auto cfg = config({1.0, 0.5}, MinimizeMode::line_even);
  cfg.noise = 0.2;
  cfg.seed = 3;
  const auto r = minimize(cfg);
  const int n = r.minimizer.size();
  REQUIRE(n == 2 * kDesk.n() - 1);
  for (int k = 0; k < n / 2; ++k) REQUIRE(r.minimizer[k] == r.minimizer[n - 1 - k]);
}

TEST_CASE("minimize errors") {
  auto cfg = config({1.0, 0.0});
  cfg.max_iters = 2;
  try {
    minimize(cfg);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last().iterations == 2);
    CHECK(e.last().residual > cfg.tol);
    CHECK(e.last().minimizer.size() == kDesk.n());
  }
  cfg = config({1.0, 0.0});
  cfg.initial = ComplexField(kDesk);
  CHECK_THROWS_AS(minimize(cfg), DegenerateDescentError);
  cfg = config({0.2, 0.5});
  CHECK_THROWS_AS(minimize(cfg), AdmissibilityError);
  cfg = config({1.0, 0.0});
  cfg.tol = 0.0;
  CHECK_THROWS_AS(minimize(cfg), ParameterError);
}

TEST_CASE("ground-state json") {
  const auto r = minimize(config({1.0, -0.5}));
  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j["mode"] == "halfline");
  CHECK(j["omega"].get<double>() == 1.0);
  CHECK(j["alpha"].get<double>() == -0.5);
  CHECK(j["value"].get<double>() == doctest::Approx(r.value));
  CHECK(j["iterations"].get<int>() == r.iterations);
  CHECK(j.contains("residual"));
}
