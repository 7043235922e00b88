// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dnls/dynamics.hpp"
#include "dnls/experiment.hpp"
#include "dnls/functionals.hpp"
#include "dnls/groundstate.hpp"
#include "dnls/profiles.hpp"

using namespace dnls;

namespace {

constexpr double kPi = 3.14159265358979323846;

constexpr double kAnchorAbs = 1e-6;
constexpr double kOdeSup = 5e-4;
constexpr double kOrderLow = 3.0;
constexpr double kOrderHigh = 5.0;
constexpr double kBcErr = 1e-12;
constexpr double kGsRel = 1e-4;
constexpr double kGsH1 = 1e-3;
constexpr double kGradRel = 1e-6;
constexpr double kRatioTol = 1e-2;
constexpr double kDrift = 1e-5;
constexpr double kVirialFactorTol = 0.02;
constexpr double kStableSmall = 5e-2;
constexpr double kStableLarge = 2e-1;
constexpr double kStrict = 1e-10;
constexpr double kRemarkRatio = 10.0;

const Grid kGrid(20.0, 2001);

struct Line {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok) { pass = pass && ok; }
};

int failures = 0;

void criterion(const std::string& name, const std::function<void(Line&)>& body) {
  Line line;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(line);
  } catch (const std::exception& e) {
    line.pass = false;
    line.detail << " exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!line.pass) ++failures;
  std::printf("%s  %-22s %s  [%.2f s]\n", line.pass ? "PASS" : "FAIL", name.c_str(), line.detail.str().c_str(),
              secs);
  std::fflush(stdout);
}

double rel_drift(const EvolutionOutcome& o, double EvolutionRecord::*field) {
  const double ref = o.records.front().*field;
  double m = 0.0;
  for (const auto& r : o.records) m = std::max(m, std::abs(r.*field - ref));
  return m / std::abs(ref);
}

double max_orbital(const EvolutionOutcome& o) {
  double m = 0.0;
  for (const auto& r : o.records) m = std::max(m, r.orbital_dist.value_or(0.0));
  return m;
}

std::vector<cplx> random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> v(n);
  for (int j = 0; j < n; ++j) v[j] = std::exp(-0.02 * j) * cplx(1.0 + 0.3 * u(rng), 0.3 * u(rng));
  return v;
}

ExperimentConfig config(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

double assertion_value(const ExperimentSummary& s, const std::string& name) {
  for (const auto& a : s.assertions) {
    if (a.name == name) return a.value;
  }
  return std::nan("");
}

}  // namespace

int main() {
  criterion("anchors", [](Line& l) {
    const WaveParams p{1.0, 0.0};
    const auto phi = standing_wave_profile(p, kGrid);
    const Norms nv = norms(phi);
    const auto r = evaluate(phi, p);
    const double errs[] = {nv.l2sq - kPi, nv.dxsq - kPi / 2.0, nv.l6pow6 - 8.0 * kPi, r.S - kPi / 2.0,
                           r.K, r.P, r.E};
    double worst = 0.0;
    for (double e : errs) worst = std::max(worst, std::abs(e));
    l.require(worst <= kAnchorAbs);
    l.detail << "max abs error " << worst << " (tol " << kAnchorAbs << ")";
  });

  criterion("profile", [](Line& l) {
    for (double alpha : {0.5, -0.5}) {
      const WaveParams p{1.0, alpha};
      const auto coarse = profile_residual(standing_wave_profile(p, kGrid), p);
      const auto fine = profile_residual(standing_wave_profile(p, Grid(20.0, 4001)), p);
      const auto bc = profile_residual(standing_wave_profile(p, kGrid), p, BoundaryDerivative::analytic);
      const double ratio = coarse.ode_sup / fine.ode_sup;
      l.require(coarse.ode_sup <= kOdeSup && ratio >= kOrderLow && ratio <= kOrderHigh && bc.bc_err <= kBcErr);
      l.detail << "alpha=" << alpha << ": ode_sup " << coarse.ode_sup << ", halving ratio " << ratio
               << ", bc_err " << bc.bc_err << "; ";
    }
  });

  criterion("ground_state", [](Line& l) {
    const WaveParams p{1.0, -0.5};
    MinimizeConfig cfg;
    cfg.params = p;
    cfg.grid = kGrid;
    cfg.max_iters = 5000;
    const auto r = minimize(cfg);
    const double d = d_ref(p, kGrid);
    const double rel = std::abs(r.value - d) / d;
    const double h1 = std::sqrt(norms(phase_align(r.minimizer) - standing_wave_profile(p, kGrid)).h1sq);
    double worst = 0.0;
    const Grid g(20.0, 201);
    const auto half = DiscreteAction::halfline(g, p);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto v = random_vector(g.n(), seed);
      const auto dir = random_vector(g.n(), seed + 100);
      const double exact = half.inner(half.gradient(v), dir);
      const double eps = 1e-5;
      auto at = [&](double t) {
        std::vector<cplx> w(v);
        for (int j = 0; j < g.n(); ++j) w[j] += t * dir[j];
        return half.action(w);
      };
      worst = std::max(worst, std::abs((at(eps) - at(-eps)) / (2.0 * eps) - exact) / std::abs(exact));
    }
    l.require(rel <= kGsRel && h1 <= kGsH1 && worst <= kGradRel);
    l.detail << "S rel err " << rel << ", H1 dist " << h1 << ", gradient FD rel err " << worst << " ("
             << r.iterations << " iters)";
  });

  criterion("halfline_line", [](Line& l) {
    for (double alpha : {-0.5, 0.5}) {
      const auto rel = halfline_line_relation({1.0, alpha}, kGrid);
      l.require(std::abs(rel.ratio - 2.0) <= kRatioTol);
      l.detail << "alpha=" << alpha << ": d_tilde/d " << rel.ratio << "; ";
    }
  });

  criterion("conservation", [](Line& l) {
    const WaveParams p{1.0, -0.5};
    const auto phi = standing_wave_profile(p, kGrid);
    const auto init = make_initial_data((1.0 + 1e-3) * phi, p.alpha);
    StepperConfig c;
    c.dt = 5e-4;
    const auto a = evolve(init, p, c, 10.0, 20);
    c.dt = 2.5e-4;
    const auto b = evolve(init, p, c, 10.0, 40);
    const double dm = rel_drift(a, &EvolutionRecord::M);
    const double de = rel_drift(a, &EvolutionRecord::E);
    const double ratio = de / rel_drift(b, &EvolutionRecord::E);
    l.require(a.status == EvolutionStatus::completed && dm <= kDrift && de <= kDrift);
    l.require(ratio >= kOrderLow && ratio <= kOrderHigh);
    l.detail << "M drift " << dm << ", E drift " << de << " (tol " << kDrift << "), E drift ratio dt/(dt/2) "
             << ratio << " (want [" << kOrderLow << ", " << kOrderHigh << "])";
  });

  criterion("virial", [](Line& l) {
    const WaveParams p{1.5, 0.5};
    const auto o = evolve(make_initial_data(blowup_family(1.0, p.alpha, kGrid), p.alpha), p, StepperConfig{}, 1.0, 20);
    const auto vc = virial_check(o, p);
    l.require(o.status == EvolutionStatus::completed);
    l.require(std::abs(vc.factor_J - 1.0) <= kVirialFactorTol && std::abs(vc.factor_I - 1.0) <= kVirialFactorTol);
    l.detail << "factor_J " << vc.factor_J << ", factor_I " << vc.factor_I << " (1 +- " << kVirialFactorTol << ")";
  });

  criterion("blowup", [](Line& l) {
    const auto s = run(config("name = acc_blowup\nkind = blowup\nalpha = 1\nt_end = 5\n"),
                       RunOptions{std::nullopt, std::nullopt, true, false});
    l.require(s.pass() && s.status == "blowup_detected");
    l.detail << "status " << s.status << ", E " << s.scalar("E_init").value_or(NAN) << ", t_final/t_star "
             << assertion_value(s, "detection_time_over_t_star") << ", parabola excess "
             << assertion_value(s, "virial_parabola") << ", max dJdt-4E " << assertion_value(s, "dJdt_below_4E");
  });

  criterion("stability", [](Line& l) {
    const WaveParams p{1.0, -0.5};
    const auto phi = standing_wave_profile(p, kGrid);
    for (const auto& [delta, tol] : {std::pair{1e-3, kStableSmall}, std::pair{1e-2, kStableLarge}}) {
      const auto o = evolve(make_initial_data((1.0 + delta) * phi, p.alpha), p, StepperConfig{}, 20.0, 20, phi);
      const double m = max_orbital(o);
      l.require(o.status == EvolutionStatus::completed && m <= tol);
      l.detail << "delta=" << delta << ": max dist " << m << " (tol " << tol << "); ";
    }
  });

  criterion("instability", [](Line& l) {
    const WaveParams p{1.0, 0.5};
    const auto v = scale(standing_wave_profile(p, kGrid), 1.1);
    const auto r = evaluate(v, p);
    const double d = d_ref(p, kGrid);
    const auto o = evolve(make_initial_data(v, p.alpha), p, StepperConfig{}, 10.0, 20);
    l.require(r.K < -kStrict && r.P < -kStrict && r.S < d - kStrict);
    l.require(o.status == EvolutionStatus::blowup_detected);
    l.detail << "K " << r.K << ", P " << r.P << ", S-d " << r.S - d << ", status " << to_string(o.status)
             << " at t=" << o.t_final;
  });

  criterion("monotone_mass", [](Line& l) {
    double last = 0.0;
    for (double omega : {0.5, 1.0, 2.0}) {
      const double m = norms(standing_wave_profile({omega, -0.5}, kGrid)).l2sq;
      l.require(m > last);
      l.detail << "omega=" << omega << ": " << m << "; ";
      last = m;
    }
  });

  criterion("remark_contrast", [](Line& l) {
    const WaveParams p{1.0, -0.5};
    const auto init = make_initial_data(standing_wave_profile(p, kGrid), p.alpha);
    StepperConfig c;
    const auto full = evolve(init, p, c, 2.0, 20);
    c.nonlinearity = Nonlinearity::plain_derivative;
    const auto plain = evolve(init, p, c, 2.0, 20);
    const double ratio = rel_drift(plain, &EvolutionRecord::E) / rel_drift(full, &EvolutionRecord::E);
    l.require(ratio >= kRemarkRatio);
    l.detail << "plain/full E drift " << ratio << " (want >= " << kRemarkRatio << ")";
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
