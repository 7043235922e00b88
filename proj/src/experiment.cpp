#include "dnls/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "dnls/errors.hpp"
#include "dnls/functionals.hpp"
#include "json.hpp"

namespace dnls {

namespace {

// Assertion tolerances. README.md lists the same table.
constexpr double kOdeResidual = 5e-4;       // at h = 0.01, omega = 1; scaled by (h / 0.01)^2 omega^(9/4)
constexpr double kBcResidual = 1e-12;       // analytic boundary derivative
constexpr double kIdentityTol = 1e-6;       // |K(phi)|, |P(phi)|
constexpr double kGroundStateRel = 1e-4;    // |value - d_ref| / d_ref
constexpr double kGroundStateH1 = 1e-3;     // H^1 distance to the profile
constexpr double kDriftTol = 1e-5;          // relative M and E drift
constexpr double kDetectionFactor = 1.2;    // t_final <= 1.2 t_star
constexpr double kParabolaTol = 0.02;       // I <= parabola + 0.02 I(0)
constexpr double kSlopeTol = 0.02;          // dJ/dt <= 4E + 0.02 |4E|
constexpr double kGradientBound = 0.95;     // ||v_x|| >= 0.95 ||v||^2 / (2 sqrt(I))
constexpr double kStrictMargin = 1e-10;     // K, P, S - d strictly negative
constexpr double kPohozaevMargin = 0.05;   // P(t) <= -(1 - 0.05) (d - S(v0)) on V-orbits
constexpr double kDriftRatio = 10.0;        // plain / full energy drift
constexpr double kResolvedEnergy = 1e-2;    // samples with |E - E(0)| <= 1e-2 |E(0)|
constexpr double kGapFraction = 0.5;        // V membership checked while |E - E(0)| <= 0.5 (d - S(0))
constexpr double kCoarseGrid = 0.02;        // h above this draws a warning

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line, int col) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + v + "'", line, col);
  }
}

long long parse_integer(const std::string& v, int line, int col) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + v + "'", line, col);
  }
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, int, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real = [](double ExperimentConfig::*field) {
      return [field](ExperimentConfig& c, const std::string& v, int l, int col) { c.*field = parse_double(v, l, col); };
    };
    auto integer = [](int ExperimentConfig::*field) {
      return [field](ExperimentConfig& c, const std::string& v, int l, int col) {
        c.*field = static_cast<int>(parse_integer(v, l, col));
      };
    };
    t["name"] = [](ExperimentConfig& c, const std::string& v, int, int) { c.name = v; };
    t["kind"] = [](ExperimentConfig& c, const std::string& v, int l, int col) {
      try {
        c.kind = parse_kind(v);
      } catch (const Error& e) {
        throw ParseError(e.what(), l, col);
      }
    };
    t["omega"] = [](ExperimentConfig& c, const std::string& v, int l, int col) {
      c.params.omega = parse_double(v, l, col);
    };
    t["alpha"] = [](ExperimentConfig& c, const std::string& v, int l, int col) {
      c.params.alpha = parse_double(v, l, col);
    };
    t["L"] = real(&ExperimentConfig::L);
    t["n"] = integer(&ExperimentConfig::n);
    t["dt"] = [](ExperimentConfig& c, const std::string& v, int l, int col) { c.stepper.dt = parse_double(v, l, col); };
    t["dt_min"] = [](ExperimentConfig& c, const std::string& v, int l, int col) {
      c.stepper.dt_min = parse_double(v, l, col);
    };
    t["theta_iters"] = [](ExperimentConfig& c, const std::string& v, int l, int col) {
      c.stepper.theta_iters = static_cast<int>(parse_integer(v, l, col));
    };
    t["sweep_tol"] = [](ExperimentConfig& c, const std::string& v, int l, int col) {
      c.stepper.sweep_tol = parse_double(v, l, col);
    };
    t["nonlinearity"] = [](ExperimentConfig& c, const std::string& v, int l, int col) {
      try {
        c.stepper.nonlinearity = parse_nonlinearity(v);
      } catch (const Error& e) {
        throw ParseError(e.what(), l, col);
      }
    };
    t["blowup_gradnorm_factor"] = [](ExperimentConfig& c, const std::string& v, int l, int col) {
      c.stepper.blowup_gradnorm_factor = parse_double(v, l, col);
    };
    t["resolution_fraction"] = [](ExperimentConfig& c, const std::string& v, int l, int col) {
      c.stepper.resolution_fraction = parse_double(v, l, col);
    };
    t["t_end"] = real(&ExperimentConfig::t_end);
    t["sample_every"] = integer(&ExperimentConfig::sample_every);
    t["delta"] = real(&ExperimentConfig::delta);
    t["lambda"] = real(&ExperimentConfig::lambda);
    t["A"] = [](ExperimentConfig& c, const std::string& v, int l, int col) { c.A = parse_double(v, l, col); };
    t["blowup_margin"] = real(&ExperimentConfig::blowup_margin);
    t["orbital_tol"] = real(&ExperimentConfig::orbital_tol);
    t["gs_mode"] = [](ExperimentConfig& c, const std::string& v, int l, int col) {
      if (v == "halfline") {
        c.gs_mode = MinimizeMode::halfline;
      } else if (v == "line_even") {
        c.gs_mode = MinimizeMode::line_even;
      } else {
        throw ParseError("gs_mode must be halfline or line_even", l, col);
      }
    };
    t["gs_tol"] = real(&ExperimentConfig::gs_tol);
    t["gs_max_iters"] = integer(&ExperimentConfig::gs_max_iters);
    t["gs_step"] = real(&ExperimentConfig::gs_step);
    t["gs_noise"] = real(&ExperimentConfig::gs_noise);
    t["rng_seed"] = [](ExperimentConfig& c, const std::string& v, int l, int col) {
      const long long s = parse_integer(v, l, col);
      if (s < 0) throw ParseError("rng_seed must be nonnegative", l, col);
      c.rng_seed = static_cast<std::uint64_t>(s);
    };
    t["output_dir"] = [](ExperimentConfig& c, const std::string& v, int, int) { c.output_dir = v; };
    return t;
  }();
  return table;
}

bool has_key(const ExperimentConfig& cfg, const std::string& key) {
  return std::find(cfg.keys.begin(), cfg.keys.end(), key) != cfg.keys.end();
}

std::vector<std::string> required_keys(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::profile:
    case ExperimentKind::groundstate: return {"omega", "alpha"};
    case ExperimentKind::evolve: return {"omega", "alpha", "t_end"};
    case ExperimentKind::blowup: return {"alpha", "t_end"};
    case ExperimentKind::stability: return {"omega", "alpha", "delta", "t_end"};
    case ExperimentKind::instability: return {"omega", "alpha", "lambda", "t_end"};
    case ExperimentKind::remark_nonconservation: return {"omega", "alpha", "t_end"};
  }
  return {};
}

bool is_dynamic(ExperimentKind kind) {
  return kind != ExperimentKind::profile && kind != ExperimentKind::groundstate;
}

// The blow-up dynamics do not involve omega; it only enters S, K and d.
WaveParams effective_params(const ExperimentConfig& cfg) {
  WaveParams p = cfg.params;
  if (cfg.kind == ExperimentKind::blowup && !has_key(cfg, "omega")) p.omega = p.alpha * p.alpha + 1.0;
  return p;
}

ComplexField initial_field(const ExperimentConfig& cfg, const WaveParams& p, const Grid& g, double* amplitude = nullptr,
                           double* threshold = nullptr) {
  switch (cfg.kind) {
    case ExperimentKind::blowup: {
      const double thr = blowup_threshold(p, g);
      const double A = cfg.A ? *cfg.A : thr * (1.0 + cfg.blowup_margin);
      if (amplitude) *amplitude = A;
      if (threshold) *threshold = thr;
      return blowup_family(A, p.alpha, g);
    }
    case ExperimentKind::instability: return scale(standing_wave_profile(p, g), cfg.lambda);
    default: return cplx(1.0 + cfg.delta) * standing_wave_profile(p, g);
  }
}

double max_relative_drift(const std::vector<EvolutionRecord>& r, double EvolutionRecord::*field) {
  const double ref = std::abs(r.front().*field);
  double d = 0.0;
  for (const auto& rec : r) d = std::max(d, std::abs(rec.*field - r.front().*field));
  return ref > 0.0 ? d / ref : d;
}

Assertion check_le(const std::string& name, double value, double tol) {
  return {name, value <= tol, value, tol, "<="};
}

Assertion check_ge(const std::string& name, double value, double tol) {
  return {name, value >= tol, value, tol, ">="};
}

Assertion check_lt(const std::string& name, double value, double tol) {
  return {name, value < tol, value, tol, "<"};
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, bool enabled, ExperimentSummary& summary)
      : dir_(std::move(dir)), enabled_(enabled), summary_(summary) {
    if (enabled_) std::filesystem::create_directories(dir_);
  }

  template <typename Fn>
  void write(const std::string& file, Fn&& fn) {
    if (!enabled_) return;
    std::ofstream os(dir_ / file);
    if (!os) throw ConfigurationError("cannot write " + (dir_ / file).string());
    fn(os);
    summary_.artifacts.push_back(file);
  }

  void text(const std::string& file, const std::string& body) {
    write(file, [&](std::ostream& os) { os << body << '\n'; });
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  bool enabled_;
  ExperimentSummary& summary_;
};

std::string profile_json(const ComplexField& phi, const WaveParams& p) {
  const Norms nv = norms(phi);
  nlohmann::ordered_json j;
  j["omega"] = p.omega;
  j["alpha"] = p.alpha;
  j["L"] = phi.grid().length();
  j["n"] = phi.grid().n();
  j["trace0"] = std::abs(phi[0]);
  j["l2sq"] = nv.l2sq;
  return j.dump(2);
}

void record_outcome(ArtifactWriter& out, const EvolutionOutcome& o, const std::string& stem = "records") {
  out.write(stem + ".csv", [&](std::ostream& os) { write_records_csv(os, o.records); });
  out.text(stem == "records" ? "outcome.json" : stem + "_outcome.json", outcome_json(o));
}

void add_virial_scalars(ExperimentSummary& s, const EvolutionOutcome& o) {
  const auto& r0 = o.records.front();
  s.scalars.emplace_back("E_init", r0.E);
  s.scalars.emplace_back("I0", r0.I);
  s.scalars.emplace_back("J0", r0.J);
  s.scalars.emplace_back("t_final", o.t_final);
  s.scalars.emplace_back("t_star_estimate", o.t_star_estimate ? *o.t_star_estimate : std::nan(""));
}

void run_profile(const ExperimentConfig& cfg, const WaveParams& p, ExperimentSummary& s, ArtifactWriter& out) {
  const Grid g = cfg.grid();
  const ComplexField phi = standing_wave_profile(p, g);
  const ProfileResidual res = profile_residual(phi, p);
  const ProfileResidual res_an = profile_residual(phi, p, BoundaryDerivative::analytic);
  const FunctionalReport r = evaluate(phi, p);
  // Truncation error h^2 |phi''''| / 12, and phi'''' scales like omega^(9/4).
  const double hr = g.h() / 0.01;
  const double tol = kOdeResidual * hr * hr * std::max(1.0, std::pow(p.omega, 2.25));
  s.assertions.push_back(check_le("ode_residual", res.ode_sup, tol));
  s.assertions.push_back(check_le("bc_residual", res_an.bc_err, kBcResidual));
  s.assertions.push_back(check_le("nehari_identity", std::abs(r.K), kIdentityTol));
  s.assertions.push_back(check_le("pohozaev_identity", std::abs(r.P), kIdentityTol));
  s.scalars.emplace_back("ode_sup", res.ode_sup);
  s.scalars.emplace_back("bc_err_fd", res.bc_err);
  s.scalars.emplace_back("d_omega", r.S);
  s.scalars.emplace_back("E_init", r.E);
  s.status = "completed";
  out.write("profile.csv", [&](std::ostream& os) { write_csv(os, phi); });
  out.text("profile.json", profile_json(phi, p));
  out.text("functionals.json", to_json(r));
}

void run_groundstate(const ExperimentConfig& cfg, const WaveParams& p, std::uint64_t seed, ExperimentSummary& s,
                     ArtifactWriter& out) {
  MinimizeConfig mc;
  mc.mode = cfg.gs_mode;
  mc.params = p;
  mc.grid = cfg.grid();
  mc.step = cfg.gs_step;
  mc.tol = cfg.gs_tol;
  mc.max_iters = cfg.gs_max_iters;
  mc.seed = seed;
  mc.noise = cfg.gs_noise;
  bool converged = true;
  std::optional<MinimizeResult> result;
  try {
    result = minimize(mc);
  } catch (const ConvergenceError& e) {
    converged = false;
    result = e.last();
  }
  const MinimizeResult& m = *result;
  const bool line = cfg.gs_mode == MinimizeMode::line_even;
  const double ref = (line ? 2.0 : 1.0) * d_ref(p, mc.grid);
  const ComplexField target = line ? even_extension(standing_wave_profile(p, mc.grid))
                                   : standing_wave_profile(p, mc.grid);
  const double dist = std::sqrt(norms(m.minimizer - target).h1sq);
  s.assertions.push_back({"converged", converged, m.residual, cfg.gs_tol, "<="});
  s.assertions.push_back(check_le("value_vs_d_ref", std::abs(m.value - ref) / ref, kGroundStateRel));
  s.assertions.push_back(check_le("h1_distance_to_profile", dist, kGroundStateH1));
  s.scalars.emplace_back("value", m.value);
  s.scalars.emplace_back("discrete_value", m.discrete_value);
  s.scalars.emplace_back("d_ref", ref);
  s.scalars.emplace_back("iterations", m.iterations);
  s.scalars.emplace_back("residual", m.residual);
  s.status = converged ? "completed" : "not_converged";
  out.write("minimizer.csv", [&](std::ostream& os) { write_csv(os, m.minimizer); });
  out.text("groundstate.json", to_json(m));
}

void run_evolve(const ExperimentConfig& cfg, const WaveParams& p, ExperimentSummary& s, ArtifactWriter& out) {
  const Grid g = cfg.grid();
  const ComplexField phi = standing_wave_profile(p, g);
  const EvolutionOutcome o =
      evolve(make_initial_data(initial_field(cfg, p, g), p.alpha), p, cfg.stepper, cfg.t_end, cfg.sample_every, phi);
  s.status = to_string(o.status);
  s.warnings.insert(s.warnings.end(), o.warnings.begin(), o.warnings.end());
  s.assertions.push_back({"completed", o.status == EvolutionStatus::completed,
                          o.status == EvolutionStatus::completed ? 1.0 : 0.0, 1.0, "=="});
  s.assertions.push_back(check_le("mass_drift", max_relative_drift(o.records, &EvolutionRecord::M), kDriftTol));
  s.assertions.push_back(check_le("energy_drift", max_relative_drift(o.records, &EvolutionRecord::E), kDriftTol));
  add_virial_scalars(s, o);
  record_outcome(out, o);
}

void run_blowup(const ExperimentConfig& cfg, const WaveParams& p, ExperimentSummary& s, ArtifactWriter& out) {
  const Grid g = cfg.grid();
  double A = 0.0;
  double threshold = 0.0;
  const ComplexField v0 = initial_field(cfg, p, g, &A, &threshold);
  const FunctionalReport r0 = evaluate(v0, p);
  const EvolutionOutcome o = evolve(make_initial_data(v0, p.alpha), p, cfg.stepper, cfg.t_end, cfg.sample_every);
  s.status = to_string(o.status);
  s.warnings.insert(s.warnings.end(), o.warnings.begin(), o.warnings.end());
  s.scalars.emplace_back("A", A);
  s.scalars.emplace_back("A_threshold", threshold);
  add_virial_scalars(s, o);

  s.assertions.push_back(check_lt("energy_negative", r0.E, 0.0));
  const bool detected = o.status == EvolutionStatus::blowup_detected;
  s.assertions.push_back({"blowup_detected", detected, detected ? 1.0 : 0.0, 1.0, "=="});
  const double ratio = o.t_star_estimate ? o.t_final / *o.t_star_estimate : std::nan("");
  s.assertions.push_back(check_le("detection_time_over_t_star", ratio, kDetectionFactor));

  const std::size_t resolved = resolved_count(o, kResolvedEnergy);
  s.scalars.emplace_back("resolved_samples", static_cast<double>(resolved));
  s.scalars.emplace_back("gradnorm_growth", o.records.back().gradnorm / o.records.front().gradnorm);
  const auto& f = o.records.front();
  double parabola_excess = -std::numeric_limits<double>::infinity();
  double gradient_ratio = std::numeric_limits<double>::infinity();
  const double mass = 2.0 * f.M;
  for (std::size_t k = 0; k < resolved; ++k) {
    const auto& rec = o.records[k];
    const double bound = f.I + 4.0 * f.J * rec.t + 8.0 * f.E * rec.t * rec.t;
    parabola_excess = std::max(parabola_excess, (rec.I - bound) / f.I);
    gradient_ratio = std::min(gradient_ratio, rec.gradnorm / (mass / (2.0 * std::sqrt(rec.I))));
  }
  s.assertions.push_back(check_le("virial_parabola", parabola_excess, kParabolaTol));
  s.assertions.push_back(check_ge("gradient_lower_bound", gradient_ratio, kGradientBound));
  double slope_excess = std::nan("");
  if (resolved >= 3) {
    const VirialCheck vc = virial_check(o, p, resolved);
    slope_excess = -std::numeric_limits<double>::infinity();
    for (double d : vc.dJdt) slope_excess = std::max(slope_excess, (d - 4.0 * f.E) / std::abs(4.0 * f.E));
    s.scalars.emplace_back("factor_J", vc.factor_J);
    s.scalars.emplace_back("factor_I", vc.factor_I);
  }
  s.assertions.push_back(check_le("dJdt_below_4E", slope_excess, kSlopeTol));
  record_outcome(out, o);
}

void run_stability(const ExperimentConfig& cfg, const WaveParams& p, ExperimentSummary& s, ArtifactWriter& out) {
  const Grid g = cfg.grid();
  const ComplexField phi = standing_wave_profile(p, g);
  const double d = d_ref(p, g);
  const EvolutionOutcome o =
      evolve(make_initial_data(initial_field(cfg, p, g), p.alpha), p, cfg.stepper, cfg.t_end, cfg.sample_every, phi);
  s.status = to_string(o.status);
  s.warnings.insert(s.warnings.end(), o.warnings.begin(), o.warnings.end());
  double worst = 0.0;
  for (const auto& r : o.records) worst = std::max(worst, r.orbital_dist.value_or(0.0));
  s.assertions.push_back({"completed", o.status == EvolutionStatus::completed,
                          o.status == EvolutionStatus::completed ? 1.0 : 0.0, 1.0, "=="});
  s.assertions.push_back(check_le("max_orbital_dist", worst, cfg.orbital_tol));
  s.scalars.emplace_back("d_omega", d);
  s.scalars.emplace_back("max_orbital_dist", worst);
  add_virial_scalars(s, o);
  const RegionTrack track = region_track(o, p, d);
  for (const auto& set : track.labels) {
    const std::string l = set.to_string();
    if (std::find(s.labels.begin(), s.labels.end(), l) == s.labels.end()) s.labels.push_back(l);
  }
  record_outcome(out, o);
}

void run_instability(const ExperimentConfig& cfg, const WaveParams& p, ExperimentSummary& s, ArtifactWriter& out) {
  const Grid g = cfg.grid();
  const ComplexField v0 = initial_field(cfg, p, g);
  const FunctionalReport r0 = evaluate(v0, p);
  const double d = d_ref(p, g);
  s.assertions.push_back(check_lt("K_negative", r0.K, -kStrictMargin));
  s.assertions.push_back(check_lt("P_negative", r0.P, -kStrictMargin));
  s.assertions.push_back(check_lt("S_below_d", r0.S - d, -kStrictMargin));
  s.scalars.emplace_back("d_omega", d);
  s.scalars.emplace_back("K_init", r0.K);
  s.scalars.emplace_back("P_init", r0.P);
  s.scalars.emplace_back("S_init", r0.S);

  const EvolutionOutcome o = evolve(make_initial_data(v0, p.alpha), p, cfg.stepper, cfg.t_end, cfg.sample_every);
  s.status = to_string(o.status);
  s.warnings.insert(s.warnings.end(), o.warnings.begin(), o.warnings.end());
  add_virial_scalars(s, o);
  const bool detected = o.status == EvolutionStatus::blowup_detected;
  s.assertions.push_back({"blowup_detected", detected, detected ? 1.0 : 0.0, 1.0, "=="});

  const RegionTrack track = region_track(o, p, d);
  const std::size_t resolved = resolved_count(o, kResolvedEnergy);
  const double gap = d - r0.S;
  const double gap_tol = std::min(kResolvedEnergy, kGapFraction * gap / std::max(std::abs(r0.E), 1e-300));
  const std::size_t decidable = resolved_count(o, gap_tol);
  std::size_t in_v = 0;
  for (std::size_t k = 0; k < decidable; ++k) in_v += track.labels[k].contains(RegionLabel::V) ? 1 : 0;
  const double frac = decidable > 0 ? static_cast<double>(in_v) / static_cast<double>(decidable) : 0.0;
  s.assertions.push_back({"resolved_samples_in_V", frac == 1.0, frac, 1.0, "=="});
  double worst_p = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < resolved; ++k) worst_p = std::max(worst_p, o.records[k].P);
  s.assertions.push_back(check_le("P_below_minus_gap", worst_p / gap, -(1.0 - kPohozaevMargin)));
  s.scalars.emplace_back("resolved_samples", static_cast<double>(resolved));
  s.scalars.emplace_back("resolved_samples_V", static_cast<double>(decidable));
  for (const auto& set : track.labels) {
    const std::string l = set.to_string();
    if (std::find(s.labels.begin(), s.labels.end(), l) == s.labels.end()) s.labels.push_back(l);
  }
  record_outcome(out, o);
}

void run_remark(const ExperimentConfig& cfg, const WaveParams& p, ExperimentSummary& s, ArtifactWriter& out) {
  const Grid g = cfg.grid();
  const InitialData init = make_initial_data(initial_field(cfg, p, g), p.alpha);
  StepperConfig full = cfg.stepper;
  full.nonlinearity = Nonlinearity::full;
  StepperConfig plain = cfg.stepper;
  plain.nonlinearity = Nonlinearity::plain_derivative;
  const EvolutionOutcome a = evolve(init, p, full, cfg.t_end, cfg.sample_every);
  const EvolutionOutcome b = evolve(init, p, plain, cfg.t_end, cfg.sample_every);
  const double drift_full = max_relative_drift(a.records, &EvolutionRecord::E);
  const double drift_plain = max_relative_drift(b.records, &EvolutionRecord::E);
  s.status = to_string(a.status) + "|" + to_string(b.status);
  s.scalars.emplace_back("energy_drift_full", drift_full);
  s.scalars.emplace_back("energy_drift_plain", drift_plain);
  s.assertions.push_back(check_ge("drift_ratio", drift_plain / drift_full, kDriftRatio));
  record_outcome(out, a, "records_full");
  record_outcome(out, b, "records_plain");
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::profile: return "profile";
    case ExperimentKind::groundstate: return "groundstate";
    case ExperimentKind::evolve: return "evolve";
    case ExperimentKind::blowup: return "blowup";
    case ExperimentKind::stability: return "stability";
    case ExperimentKind::instability: return "instability";
    case ExperimentKind::remark_nonconservation: return "remark_nonconservation";
  }
  return "profile";
}

ExperimentKind parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::profile, ExperimentKind::groundstate, ExperimentKind::evolve, ExperimentKind::blowup,
                 ExperimentKind::stability, ExperimentKind::instability, ExperimentKind::remark_nonconservation}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigurationError("unknown experiment kind '" + s + "'");
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::string line = raw.substr(0, raw.find('#'));
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    const int key_col = static_cast<int>(line.find_first_not_of(" \t")) + 1;
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno, key_col);
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("missing key before '='", lineno, key_col);
    const auto vpos = line.find_first_not_of(" \t", eq + 1);
    const int value_col = static_cast<int>(vpos == std::string::npos ? eq + 2 : vpos + 1);
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ParseError("unknown key '" + key + "'", lineno, key_col);
    if (has_key(cfg, key)) throw ParseError("duplicate key '" + key + "'", lineno, key_col);
    if (value.empty()) throw ParseError("missing value for '" + key + "'", lineno, value_col);
    it->second(cfg, value, lineno, value_col);
    cfg.keys.push_back(key);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigurationError("cannot read config " + path.string());
  return parse_config(is);
}

Diagnostics validate(const ExperimentConfig& cfg) {
  Diagnostics d;
  if (!has_key(cfg, "name")) d.errors.push_back("name: required");
  if (!has_key(cfg, "kind")) d.errors.push_back("kind: required");
  if (!cfg.name.empty() && cfg.name.find_first_of("/\\") != std::string::npos) {
    d.errors.push_back("name: must not contain path separators");
  }
  for (const auto& key : required_keys(cfg.kind)) {
    if (!has_key(cfg, key)) d.errors.push_back(key + ": required for kind " + to_string(cfg.kind));
  }
  const WaveParams p = effective_params(cfg);
  if (!p.admissible()) {
    d.errors.push_back("omega: admissibility requires omega > alpha^2 (omega = " + format_value(p.omega) +
                       ", alpha = " + format_value(p.alpha) + ")");
  }
  if (!(cfg.L > 0.0)) d.errors.push_back("L: must be positive");
  if (cfg.n < 7) d.errors.push_back("n: at least 7 nodes required");
  if (cfg.n % 2 == 0) d.errors.push_back("n: Simpson quadrature needs an odd node count");
  if (cfg.L > 0.0 && cfg.n > 1 && cfg.L / (cfg.n - 1) > kCoarseGrid) {
    d.warnings.push_back("n: grid spacing " + format_value(cfg.L / (cfg.n - 1)) + " exceeds " +
                         format_value(kCoarseGrid) + "; tolerances are calibrated for h <= 0.01");
  }
  if (is_dynamic(cfg.kind)) {
    try {
      cfg.stepper.validate();
    } catch (const Error& e) {
      d.errors.push_back(std::string("stepper: ") + e.what());
    }
    if (!(cfg.t_end > 0.0)) d.errors.push_back("t_end: must be positive");
    if (cfg.sample_every < 1) d.errors.push_back("sample_every: must be at least 1");
  }
  if (cfg.kind == ExperimentKind::groundstate) {
    if (!(cfg.gs_tol > 0.0)) d.errors.push_back("gs_tol: must be positive");
    if (cfg.gs_max_iters < 1) d.errors.push_back("gs_max_iters: must be at least 1");
    if (!(cfg.gs_step > 0.0)) d.errors.push_back("gs_step: must be positive");
    if (cfg.gs_noise < 0.0) d.errors.push_back("gs_noise: must be nonnegative");
  }
  if (cfg.delta <= -1.0) d.errors.push_back("delta: must exceed -1");
  switch (cfg.kind) {
    case ExperimentKind::blowup:
      if (!(p.alpha > 0.0)) d.warnings.push_back("alpha: blow-up for negative energy is only guaranteed for alpha > 0");
      if (cfg.A && !(*cfg.A > 0.0)) d.errors.push_back("A: must be positive");
      if (!(cfg.blowup_margin > 0.0)) d.errors.push_back("blowup_margin: must be positive");
      break;
    case ExperimentKind::stability:
      if (!(p.alpha < 0.0)) d.warnings.push_back("alpha: orbital stability is only expected for alpha < 0");
      if (!(cfg.orbital_tol > 0.0)) d.errors.push_back("orbital_tol: must be positive");
      break;
    case ExperimentKind::instability:
      if (!(p.alpha > 0.0)) d.warnings.push_back("alpha: instability by blow-up is only expected for alpha > 0");
      if (!(cfg.lambda > 1.0)) d.errors.push_back("lambda: must exceed 1");
      break;
    default: break;
  }
  if (d.ok() && is_dynamic(cfg.kind)) {
    const Grid g = cfg.grid();
    try {
      const InitialData init = make_initial_data(initial_field(cfg, p, g), p.alpha);
      if (!init.robin_compatible) d.warnings.push_back("initial data: Robin condition v_x(0) = alpha v(0) not satisfied");
      if (!init.finite_variance) d.warnings.push_back("initial data: variance int x^2 |v|^2 not finite on the box");
    } catch (const Error& e) {
      d.errors.push_back(std::string("initial data: ") + e.what());
    }
  }
  return d;
}

bool ExperimentSummary::pass() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

std::optional<double> ExperimentSummary::scalar(const std::string& key) const {
  for (const auto& [k, v] : scalars) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string ExperimentSummary::to_json() const {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr); };
  nlohmann::ordered_json j;
  j["name"] = name;
  j["kind"] = dnls::to_string(kind);
  j["pass"] = pass();
  j["status"] = status;
  j["assertions"] = nlohmann::ordered_json::array();
  for (const auto& a : assertions) {
    nlohmann::ordered_json e;
    e["name"] = a.name;
    e["passed"] = a.passed;
    e["value"] = num(a.value);
    e["relation"] = a.relation;
    e["tolerance"] = num(a.tolerance);
    j["assertions"].push_back(e);
  }
  j["scalars"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : scalars) j["scalars"][k] = num(v);
  j["labels"] = labels;
  j["warnings"] = warnings;
  j["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& a : artifacts) j["artifacts"].push_back(a.generic_string());
  return j.dump(2);
}

ComplexField blowup_family(double A, double alpha, const Grid& g) {
  ComplexField v(g);
  for (int j = 0; j < g.n(); ++j) {
    const double x = g.x(j);
    v[j] = A * (1.0 + alpha * x) * std::exp(-0.5 * x * x);
  }
  return v;
}

double blowup_threshold(const WaveParams& p, const Grid& g) {
  auto energy = [&](double A) { return evaluate(blowup_family(A, p.alpha, g), p).E; };
  constexpr double kStep = 0.05;
  double lo = 0.0;
  double hi = kStep;
  while (energy(hi) >= 0.0) {
    lo = hi;
    hi += kStep;
    if (hi > 100.0) throw PreconditionError("no amplitude A <= 100 gives E(psi_A) < 0");
  }
  for (int it = 0; it < 60 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (energy(mid) < 0.0 ? hi : lo) = mid;
  }
  return hi;
}

ExperimentSummary run(const ExperimentConfig& cfg, const RunOptions& opts) {
  const Diagnostics diag = validate(cfg);
  if (!diag.ok()) {
    std::string msg = "invalid config";
    for (const auto& e : diag.errors) msg += "\n  " + e;
    throw ConfigurationError(msg);
  }
  const WaveParams p = effective_params(cfg);
  const std::uint64_t seed = opts.seed.value_or(cfg.rng_seed);

  ExperimentSummary s;
  s.name = cfg.name;
  s.kind = cfg.kind;
  s.warnings = diag.warnings;
  ArtifactWriter out(opts.output_dir.value_or(cfg.output_dir) / cfg.name, opts.write_artifacts, s);
  if (!opts.quiet) std::cerr << "running " << cfg.name << " (" << to_string(cfg.kind) << ")\n";

  s.scalars.emplace_back("omega", p.omega);
  s.scalars.emplace_back("alpha", p.alpha);
  s.scalars.emplace_back("l2sq", norms(standing_wave_profile(p, cfg.grid())).l2sq);
  switch (cfg.kind) {
    case ExperimentKind::profile: run_profile(cfg, p, s, out); break;
    case ExperimentKind::groundstate: run_groundstate(cfg, p, seed, s, out); break;
    case ExperimentKind::evolve: run_evolve(cfg, p, s, out); break;
    case ExperimentKind::blowup: run_blowup(cfg, p, s, out); break;
    case ExperimentKind::stability: run_stability(cfg, p, s, out); break;
    case ExperimentKind::instability: run_instability(cfg, p, s, out); break;
    case ExperimentKind::remark_nonconservation: run_remark(cfg, p, s, out); break;
  }
  if (opts.write_artifacts) {
    s.artifacts.push_back("summary.json");
    std::ofstream os(out.dir() / "summary.json");
    os << s.to_json() << '\n';
  }
  if (!opts.quiet) {
    for (const auto& a : s.assertions) {
      std::cerr << "  " << (a.passed ? "PASS " : "FAIL ") << a.name << ": " << a.value << ' ' << a.relation << ' '
                << a.tolerance << '\n';
    }
  }
  return s;
}

void set_parameter(ExperimentConfig& cfg, const std::string& param, double value) {
  auto mark = [&](const std::string& key) {
    if (!has_key(cfg, key)) cfg.keys.push_back(key);
  };
  if (param == "omega") {
    cfg.params.omega = value;
  } else if (param == "alpha") {
    cfg.params.alpha = value;
  } else if (param == "lambda") {
    cfg.lambda = value;
  } else if (param == "delta") {
    cfg.delta = value;
  } else if (param == "A") {
    cfg.A = value;
  } else {
    throw ParameterError("sweep parameter must be one of omega, alpha, lambda, delta, A (got '" + param + "')");
  }
  mark(param);
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols = {"value",  "pass",    "status",          "l2sq",
                                                "d_omega", "E_init", "t_final",         "t_star_estimate",
                                                "max_orbital_dist"};
  return cols;
}

std::vector<ExperimentSummary> sweep(const ExperimentConfig& cfg, const std::string& param,
                                     const std::vector<double>& values, const RunOptions& opts) {
  if (values.empty()) throw ParameterError("sweep needs at least one value");
  ExperimentConfig probe = cfg;
  set_parameter(probe, param, values.front());
  const std::filesystem::path root = opts.output_dir.value_or(cfg.output_dir) / cfg.name;
  RunOptions sub = opts;
  sub.output_dir = root;

  std::vector<ExperimentSummary> out;
  for (double v : values) {
    ExperimentConfig c = cfg;
    set_parameter(c, param, v);
    c.name = cfg.name + "_" + param + "_" + format_value(v);
    out.push_back(run(c, sub));
  }
  if (opts.write_artifacts) {
    std::filesystem::create_directories(root);
    std::ofstream os(root / ("sweep_" + param + ".csv"));
    os << param;
    for (std::size_t k = 1; k < sweep_columns().size(); ++k) os << ',' << sweep_columns()[k];
    os << '\n' << std::setprecision(17);
    auto cell = [&](const ExperimentSummary& s, const std::string& key) {
      const auto x = s.scalar(key);
      if (x && std::isfinite(*x)) os << *x;
    };
    for (std::size_t k = 0; k < values.size(); ++k) {
      const auto& s = out[k];
      os << values[k] << ',' << (s.pass() ? 1 : 0) << ',' << s.status << ',';
      cell(s, "l2sq");
      os << ',';
      cell(s, "d_omega");
      os << ',';
      cell(s, "E_init");
      os << ',';
      cell(s, "t_final");
      os << ',';
      cell(s, "t_star_estimate");
      os << ',';
      cell(s, "max_orbital_dist");
      os << '\n';
    }
  }
  return out;
}

}  // namespace dnls
