#pragma once

// Crank-Nicolson time stepping of
//
//   i v_t + v_xx = (i/2)|v|^2 v_x - (i/2) v^2 conj(v_x) - (3/16)|v|^4 v
//
// on [0, L] with v_x(0) = alpha v(0) and v(L) = 0, plus the virial
// diagnostics used to detect blow-up.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dnls/field.hpp"
#include "dnls/functionals.hpp"
#include "dnls/profiles.hpp"

namespace dnls {

enum class Nonlinearity { full, plain_derivative };

std::string to_string(Nonlinearity n);
Nonlinearity parse_nonlinearity(const std::string& s);

struct StepperConfig {
  double dt = 5e-4;
  /// Collapse threshold; dt / 2^15 when absent.
  std::optional<double> dt_min;
  int theta_iters = 3;
  /// The last sweep must move the iterate by at most sweep_tol * max(1, max|v|).
  double sweep_tol = 1e-5;
  Nonlinearity nonlinearity = Nonlinearity::full;
  double blowup_gradnorm_factor = 1e3;
  /// Blow-up is also declared once ||v_x|| reaches this fraction of
  /// 2 ||v|| / h, the largest gradient the grid can represent. 0 disables.
  double resolution_fraction = 0.25;

  double effective_dt_min() const { return dt_min ? *dt_min : dt / 32768.0; }
  /// Throws ParameterError on dt <= 0, dt_min >= dt, theta_iters < 1 or
  /// a non-positive blow-up factor.
  void validate() const;
};

/// W(v) = -Im(conj(v) v_x) - (3/16)|v|^4 with the Robin-ghost derivative;
/// the full nonlinearity equals W(v) v.
std::vector<double> multiplier(const ComplexField& v, double alpha);

/// One Crank-Nicolson step with theta_iters fixed-point sweeps. Returns
/// nullopt when the sweeps diverge, stall above sweep_tol or produce
/// non-finite values.
std::optional<ComplexField> step(const ComplexField& v, const WaveParams& p, const StepperConfig& cfg,
                                 double dt);

struct EvolutionRecord {
  double t = 0.0;
  double M = 0.0;
  double E = 0.0;
  double S = 0.0;
  double K = 0.0;
  double P = 0.0;
  double I = 0.0;
  double J = 0.0;         ///< Im int x u_x conj(u), u = gauge_quarter(v)
  double gradnorm = 0.0;  ///< ||v_x||
  double trace0sq = 0.0;
  double xquartic = 0.0;  ///< int x |v|^4
  std::optional<double> orbital_dist;
  double dt_current = 0.0;
};

EvolutionRecord measure(const ComplexField& v, const WaveParams& p, double t, double dt_current,
                        const std::optional<ComplexField>& reference = std::nullopt);

/// min over theta of ||v - e^{i theta} phi||_{H^1}.
double orbital_distance(const ComplexField& v, const ComplexField& phi);

enum class EvolutionStatus { completed, blowup_detected, step_collapse };

std::string to_string(EvolutionStatus s);

struct EvolutionOutcome {
  EvolutionStatus status = EvolutionStatus::completed;
  std::vector<EvolutionRecord> records;
  double t_final = 0.0;
  std::optional<double> t_star_estimate;
  std::optional<ComplexField> final_state;
  std::vector<std::string> warnings;
};

/// Positive root of I0 + 4 J0 t + 8 E t^2 when E < 0.
std::optional<double> virial_time(double I0, double J0, double E);

/// Adaptive evolution: dt is halved on step failure and doubled back after
/// a run of successes. Stops at t_end, at blow-up detection or at step
/// collapse. Blow-up is declared when ||v_x|| reaches
/// blowup_gradnorm_factor times its initial value or the resolution
/// ceiling, or when dt falls below dt_min after ||v_x|| has grown.
EvolutionOutcome evolve(const InitialData& init, const WaveParams& p, const StepperConfig& cfg, double t_end,
                        int sample_every, const std::optional<ComplexField>& reference_profile = std::nullopt);

struct VirialCheck {
  double slopeJ_lhs = 0.0;  ///< mean measured dJ/dt
  double slopeJ_rhs = 0.0;  ///< mean of 4E - alpha |v(0)|^2
  double slopeI_lhs = 0.0;  ///< mean measured dI/dt
  double slopeI_rhs = 0.0;  ///< mean of 4J - int x |v|^4
  double factor_J = 0.0;    ///< least-squares c in dJ/dt ~ c (4E - alpha |v(0)|^2)
  double factor_I = 0.0;    ///< least-squares c in dI/dt ~ c (4J - int x |v|^4)
  std::vector<double> t;    ///< interior sample times
  std::vector<double> dJdt;
  std::vector<double> dIdt;
  std::vector<double> rhsJ;
  std::vector<double> rhsI;
};

/// Second-order (non-uniform) central differences of the first `count`
/// records (all when absent). Factors are 0 when the candidate right-hand
/// side vanishes identically.
VirialCheck virial_check(const EvolutionOutcome& outcome, const WaveParams& p,
                         std::optional<std::size_t> count = std::nullopt);

/// Number of leading records whose energy stays within rel_tol of the
/// initial energy. Past that point the grid no longer resolves the field.
std::size_t resolved_count(const EvolutionOutcome& outcome, double rel_tol = 1e-2);

struct RegionTrack {
  std::vector<RegionSet> labels;
  std::optional<std::size_t> first_change;  ///< index of the first record whose set differs from the first
};

RegionTrack region_track(const EvolutionOutcome& outcome, const WaveParams& p, double d_omega);

/// Header `t,M,E,S,K,P,I,J,gradnorm,trace0sq,xquartic,orbital_dist,dt_current`;
/// orbital_dist is left empty when absent.
void write_records_csv(std::ostream& os, const std::vector<EvolutionRecord>& records);
std::vector<EvolutionRecord> read_records_csv(std::istream& is);

/// JSON {status, t_final, t_star_estimate} (null when absent).
std::string outcome_json(const EvolutionOutcome& outcome);

}  // namespace dnls
