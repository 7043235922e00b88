#include "dnls/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "dnls/errors.hpp"
#include "dnls/tridiagonal.hpp"
#include "json.hpp"

namespace dnls {

namespace {

// dt is doubled back towards cfg.dt after this many consecutive successes.
constexpr int kRestoreAfter = 10;
// A dt collapse counts as blow-up only once ||v_x|| has grown this much.
constexpr double kCollapseGrowth = 4.0;
constexpr double kRoundoff = 1e-14;

constexpr const char* kRecordHeader = "t,M,E,S,K,P,I,J,gradnorm,trace0sq,xquartic,orbital_dist,dt_current";

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::norm(a[j] - b[j]));
  return std::sqrt(m);
}

// D2 restricted to the unknowns 0..n-2 (v_{n-1} = 0), Robin ghost at node 0.
struct RobinLaplacian {
  std::vector<double> lower, diag, upper;

  RobinLaplacian(const Grid& g, double alpha) {
    const int m = g.n() - 1;
    const double ih2 = 1.0 / (g.h() * g.h());
    lower.assign(m, ih2);
    diag.assign(m, -2.0 * ih2);
    upper.assign(m, ih2);
    diag[0] = -(2.0 + 2.0 * g.h() * alpha) * ih2;
    upper[0] = 2.0 * ih2;
    lower[0] = 0.0;
    upper[m - 1] = 0.0;
  }

  cplx apply(const std::vector<cplx>& v, int j) const {
    cplx r = diag[j] * v[j];
    if (j > 0) r += lower[j] * v[j - 1];
    if (j + 1 < static_cast<int>(v.size())) r += upper[j] * v[j + 1];
    return r;
  }
};

}  // namespace

std::string to_string(Nonlinearity n) { return n == Nonlinearity::full ? "full" : "plain_derivative"; }

Nonlinearity parse_nonlinearity(const std::string& s) {
  if (s == "full") return Nonlinearity::full;
  if (s == "plain_derivative") return Nonlinearity::plain_derivative;
  throw ParameterError("unknown nonlinearity '" + s + "' (expected full or plain_derivative)");
}

void StepperConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be positive");
  const double lo = effective_dt_min();
  if (!(lo > 0.0) || !(lo < dt)) throw ParameterError("dt_min must satisfy 0 < dt_min < dt");
  if (theta_iters < 1) throw ParameterError("theta_iters must be at least 1");
  if (!(sweep_tol > 0.0)) throw ParameterError("sweep_tol must be positive");
  if (!(blowup_gradnorm_factor > 1.0)) throw ParameterError("blowup_gradnorm_factor must exceed 1");
  if (!(resolution_fraction >= 0.0) || resolution_fraction > 1.0) {
    throw ParameterError("resolution_fraction must lie in [0, 1]");
  }
}

std::vector<double> multiplier(const ComplexField& v, double alpha) {
  const ComplexField vx = differentiate(v, alpha);
  std::vector<double> w(v.size());
  for (int j = 0; j < v.size(); ++j) {
    const double a2 = std::norm(v[j]);
    w[j] = -std::imag(std::conj(v[j]) * vx[j]) - 3.0 / 16.0 * a2 * a2;
  }
  return w;
}

std::optional<ComplexField> step(const ComplexField& v, const WaveParams& p, const StepperConfig& cfg,
                                 double dt) {
  if (!(dt > 0.0)) throw ParameterError("step needs dt > 0");
  if (cfg.theta_iters < 1) throw ParameterError("theta_iters must be at least 1");
  require_finite(v);
  const Grid& g = v.grid();
  const int m = g.n() - 1;
  const RobinLaplacian d2(g, p.alpha);
  const cplx idt(0.0, 1.0 / dt);

  std::vector<cplx> u(v.values().begin(), v.values().begin() + m);
  std::vector<cplx> base(m);
  for (int j = 0; j < m; ++j) base[j] = idt * u[j] - 0.5 * d2.apply(u, j);

  const bool full = cfg.nonlinearity == Nonlinearity::full;
  const std::vector<double> w_old = full ? multiplier(v, p.alpha) : std::vector<double>{};

  std::vector<cplx> lower(m), diag(m), upper(m), rhs(m);
  for (int j = 0; j < m; ++j) {
    lower[j] = 0.5 * d2.lower[j];
    upper[j] = 0.5 * d2.upper[j];
  }
  double scale = 1.0;
  for (const auto& z : u) scale = std::max(scale, std::abs(z));
  std::vector<cplx> guess = u;
  std::vector<cplx> work(g.n(), 0.0);
  double last_change = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < cfg.theta_iters; ++sweep) {
    for (int j = 0; j < m; ++j) {
      diag[j] = idt + 0.5 * d2.diag[j];
      rhs[j] = base[j];
    }
    if (full) {
      std::copy(guess.begin(), guess.end(), work.begin());
      const std::vector<double> w_new = multiplier(ComplexField(g, work), p.alpha);
      for (int j = 0; j < m; ++j) {
        const double wbar = 0.5 * (w_old[j] + w_new[j]);
        diag[j] -= 0.5 * wbar;
        rhs[j] += 0.5 * wbar * u[j];
      }
    } else {
      for (int j = 0; j < m; ++j) work[j] = 0.5 * (u[j] + guess[j]);
      const ComplexField midf(g, work);
      const ComplexField mx = differentiate(midf, p.alpha);
      for (int j = 0; j < m; ++j) rhs[j] += cplx(0.0, 1.0) * std::norm(midf[j]) * mx[j];
    }
    std::vector<cplx> next;
    try {
      next = solve_tridiagonal<cplx, cplx>(lower, diag, upper, rhs);
    } catch (const NumericalError&) {
      return std::nullopt;
    }
    const double change = max_abs_diff(next, guess);
    if (!std::isfinite(change)) return std::nullopt;
    guess = std::move(next);
    // Below this the sweep only shuffles rounding errors.
    if (change <= kRoundoff * scale) {
      last_change = change;
      break;
    }
    if (change > last_change) return std::nullopt;
    last_change = change;
  }
  if (last_change > cfg.sweep_tol * scale) return std::nullopt;
  guess.push_back(0.0);
  return ComplexField(g, std::move(guess));
}

double orbital_distance(const ComplexField& v, const ComplexField& phi) {
  if (!(v.grid() == phi.grid())) throw DimensionError("orbital distance needs fields on the same grid");
  const double vv = std::real(h1_inner(v, v));
  const double pp = std::real(h1_inner(phi, phi));
  const double cross = std::abs(h1_inner(v, phi));
  return std::sqrt(std::max(0.0, vv + pp - 2.0 * cross));
}

EvolutionRecord measure(const ComplexField& v, const WaveParams& p, double t, double dt_current,
                        const std::optional<ComplexField>& reference) {
  const Norms nv = norms(v);
  const FunctionalReport r = evaluate(nv, p);
  const Grid& g = v.grid();
  EvolutionRecord rec;
  rec.t = t;
  rec.M = r.M;
  rec.E = r.E;
  rec.S = r.S;
  rec.K = r.K;
  rec.P = r.P;
  rec.I = r.I;
  rec.gradnorm = std::sqrt(nv.dxsq);
  rec.trace0sq = nv.trace0sq;
  rec.dt_current = dt_current;

  const ComplexField u = gauge_quarter(v);
  const ComplexField ux = differentiate_high_order(u);
  std::vector<double> jx(g.n()), x4(g.n());
  for (int j = 0; j < g.n(); ++j) {
    const double x = g.x(j);
    jx[j] = x * std::imag(ux[j] * std::conj(u[j]));
    const double a2 = std::norm(v[j]);
    x4[j] = x * a2 * a2;
  }
  rec.J = integrate(g, jx);
  rec.xquartic = integrate(g, x4);
  if (reference) rec.orbital_dist = orbital_distance(v, *reference);
  return rec;
}

std::string to_string(EvolutionStatus s) {
  switch (s) {
    case EvolutionStatus::completed: return "completed";
    case EvolutionStatus::blowup_detected: return "blowup_detected";
    case EvolutionStatus::step_collapse: return "step_collapse";
  }
  return "completed";
}

std::optional<double> virial_time(double I0, double J0, double E) {
  if (!(E < 0.0)) return std::nullopt;
  const double a = 8.0 * E;
  const double b = 4.0 * J0;
  const double disc = b * b - 4.0 * a * I0;
  if (disc < 0.0) return std::nullopt;
  const double root = (-b - std::sqrt(disc)) / (2.0 * a);
  if (!(root > 0.0)) return std::nullopt;
  return root;
}

EvolutionOutcome evolve(const InitialData& init, const WaveParams& p, const StepperConfig& cfg, double t_end,
                        int sample_every, const std::optional<ComplexField>& reference_profile) {
  cfg.validate();
  if (!(t_end > 0.0)) throw ParameterError("t_end must be positive");
  if (sample_every < 1) throw ParameterError("sample_every must be at least 1");
  require_finite(init.field);
  const Grid& g = init.field.grid();
  if (reference_profile && !(reference_profile->grid() == g)) {
    throw DimensionError("reference profile and initial field live on different grids");
  }

  EvolutionOutcome out;
  if (!init.robin_compatible) out.warnings.push_back("initial data does not satisfy v_x(0) = alpha v(0)");
  if (!init.finite_variance) out.warnings.push_back("initial data has no finite variance on the box");

  ComplexField v = init.field;
  v[g.n() - 1] = 0.0;
  double t = 0.0;
  double dt = cfg.dt;
  const double dt_min = cfg.effective_dt_min();

  out.records.push_back(measure(v, p, t, dt, reference_profile));
  const EvolutionRecord& first = out.records.front();
  out.t_star_estimate = virial_time(first.I, first.J, first.E);
  const double grad0 = first.gradnorm;

  long accepted = 0;
  int streak = 0;
  bool recorded_last = true;
  const double t_eps = 1e-12 * t_end;
  while (t < t_end - t_eps) {
    const double h = std::min(dt, t_end - t);
    std::optional<ComplexField> next = step(v, p, cfg, h);
    if (!next) {
      dt *= 0.5;
      streak = 0;
      if (dt < dt_min) {
        EvolutionRecord rec = measure(v, p, t, dt, reference_profile);
        const bool grew = rec.gradnorm >= kCollapseGrowth * grad0;
        out.status = grew ? EvolutionStatus::blowup_detected : EvolutionStatus::step_collapse;
        if (!recorded_last) out.records.push_back(std::move(rec));
        recorded_last = true;
        break;
      }
      continue;
    }
    v = std::move(*next);
    t += h;
    ++accepted;
    if (++streak >= kRestoreAfter && dt < cfg.dt) {
      dt = std::min(cfg.dt, 2.0 * dt);
      streak = 0;
    }
    const Norms nv = norms(v);
    const double grad = std::sqrt(nv.dxsq);
    const double ceiling = cfg.resolution_fraction > 0.0
                               ? cfg.resolution_fraction * 2.0 * std::sqrt(nv.l2sq) / g.h()
                               : std::numeric_limits<double>::infinity();
    if (grad > 0.0 && grad >= std::min(cfg.blowup_gradnorm_factor * grad0, ceiling)) {
      out.records.push_back(measure(v, p, t, dt, reference_profile));
      recorded_last = true;
      out.status = EvolutionStatus::blowup_detected;
      break;
    }
    recorded_last = false;
    if (accepted % sample_every == 0) {
      out.records.push_back(measure(v, p, t, dt, reference_profile));
      recorded_last = true;
    }
  }
  if (!recorded_last) out.records.push_back(measure(v, p, t, dt, reference_profile));
  out.t_final = t;
  out.final_state = std::move(v);
  return out;
}

namespace {

// Derivative at the middle of three non-uniform samples.
double central_slope(double t0, double t1, double t2, double f0, double f1, double f2) {
  const double h0 = t1 - t0;
  const double h1 = t2 - t1;
  return (-h1 / (h0 * (h0 + h1))) * f0 + ((h1 - h0) / (h0 * h1)) * f1 + (h0 / (h1 * (h0 + h1))) * f2;
}

double ls_factor(const std::vector<double>& lhs, const std::vector<double>& rhs) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    num += lhs[k] * rhs[k];
    den += rhs[k] * rhs[k];
  }
  return den > 0.0 ? num / den : 0.0;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

VirialCheck virial_check(const EvolutionOutcome& outcome, const WaveParams& p, std::optional<std::size_t> count) {
  const auto& r = outcome.records;
  const std::size_t used = std::min(r.size(), count.value_or(r.size()));
  if (used < 3) throw InsufficientDataError("virial_check needs at least 3 records");
  VirialCheck vc;
  for (std::size_t k = 1; k + 1 < used; ++k) {
    const double t0 = r[k - 1].t, t1 = r[k].t, t2 = r[k + 1].t;
    if (!(t1 > t0) || !(t2 > t1)) continue;
    vc.t.push_back(t1);
    vc.dJdt.push_back(central_slope(t0, t1, t2, r[k - 1].J, r[k].J, r[k + 1].J));
    vc.dIdt.push_back(central_slope(t0, t1, t2, r[k - 1].I, r[k].I, r[k + 1].I));
    vc.rhsJ.push_back(4.0 * r[k].E - p.alpha * r[k].trace0sq);
    vc.rhsI.push_back(4.0 * r[k].J - r[k].xquartic);
  }
  if (vc.t.empty()) throw InsufficientDataError("virial_check needs strictly increasing sample times");
  vc.slopeJ_lhs = mean(vc.dJdt);
  vc.slopeJ_rhs = mean(vc.rhsJ);
  vc.slopeI_lhs = mean(vc.dIdt);
  vc.slopeI_rhs = mean(vc.rhsI);
  vc.factor_J = ls_factor(vc.dJdt, vc.rhsJ);
  vc.factor_I = ls_factor(vc.dIdt, vc.rhsI);
  return vc;
}

std::size_t resolved_count(const EvolutionOutcome& outcome, double rel_tol) {
  const auto& r = outcome.records;
  if (r.empty()) return 0;
  const double e0 = r.front().E;
  const double ref = std::max(std::abs(e0), std::numeric_limits<double>::min());
  std::size_t k = 0;
  while (k < r.size() && std::abs(r[k].E - e0) <= rel_tol * ref) ++k;
  return k;
}

RegionTrack region_track(const EvolutionOutcome& outcome, const WaveParams& p, double d_omega) {
  RegionTrack track;
  for (const auto& rec : outcome.records) {
    FunctionalReport r;
    r.M = rec.M;
    r.E = rec.E;
    r.S = rec.S;
    r.K = rec.K;
    r.P = rec.P;
    r.N = 3.0 * rec.S - 1.5 * rec.K;
    r.L = r.K + r.N;
    r.trace0sq = rec.trace0sq;
    r.I = rec.I;
    r.omega = p.omega;
    r.alpha = p.alpha;
    track.labels.push_back(classify(r, d_omega));
    if (!track.first_change && !(track.labels.back() == track.labels.front())) {
      track.first_change = track.labels.size() - 1;
    }
  }
  return track;
}

void write_records_csv(std::ostream& os, const std::vector<EvolutionRecord>& records) {
  os << kRecordHeader << '\n' << std::setprecision(17);
  for (const auto& r : records) {
    os << r.t << ',' << r.M << ',' << r.E << ',' << r.S << ',' << r.K << ',' << r.P << ',' << r.I << ',' << r.J
       << ',' << r.gradnorm << ',' << r.trace0sq << ',' << r.xquartic << ',';
    if (r.orbital_dist) os << *r.orbital_dist;
    os << ',' << r.dt_current << '\n';
  }
}

std::vector<EvolutionRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kRecordHeader) {
    throw ParseError(std::string("expected header '") + kRecordHeader + "'", 1, 1);
  }
  std::vector<EvolutionRecord> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 13) throw ParseError("expected 13 columns", lineno, 1);
    auto num = [&](std::size_t k) {
      try {
        std::size_t used = 0;
        const double x = std::stod(cells[k], &used);
        if (used != cells[k].size()) throw std::invalid_argument("trailing");
        return x;
      } catch (const std::exception&) {
        int col = 1;
        for (std::size_t c = 0; c < k; ++c) col += static_cast<int>(cells[c].size()) + 1;
        throw ParseError("not a number: '" + cells[k] + "'", lineno, col);
      }
    };
    EvolutionRecord r;
    r.t = num(0);
    r.M = num(1);
    r.E = num(2);
    r.S = num(3);
    r.K = num(4);
    r.P = num(5);
    r.I = num(6);
    r.J = num(7);
    r.gradnorm = num(8);
    r.trace0sq = num(9);
    r.xquartic = num(10);
    if (!cells[11].empty()) r.orbital_dist = num(11);
    r.dt_current = num(12);
    out.push_back(r);
  }
  return out;
}

std::string outcome_json(const EvolutionOutcome& outcome) {
  nlohmann::ordered_json j;
  j["status"] = to_string(outcome.status);
  j["t_final"] = outcome.t_final;
  if (outcome.t_star_estimate) {
    j["t_star_estimate"] = *outcome.t_star_estimate;
  } else {
    j["t_star_estimate"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace dnls
