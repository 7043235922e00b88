#pragma once

// Declarative experiments: flat `key = value` configs, per-kind runners with
// pass/fail assertions, parameter sweeps and the on-disk artifacts.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dnls/dynamics.hpp"
#include "dnls/groundstate.hpp"
#include "dnls/profiles.hpp"

namespace dnls {

enum class ExperimentKind { profile, groundstate, evolve, blowup, stability, instability, remark_nonconservation };

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

struct ExperimentConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::profile;
  WaveParams params;
  double L = 20.0;
  int n = 2001;
  StepperConfig stepper;
  double t_end = 10.0;
  int sample_every = 20;
  double delta = 0.0;    ///< v0 = (1 + delta) phi
  double lambda = 1.1;   ///< v0 = phi_lambda
  std::optional<double> A;  ///< blow-up amplitude; threshold * (1 + blowup_margin) when absent
  double blowup_margin = 0.25;
  double orbital_tol = 5e-2;
  MinimizeMode gs_mode = MinimizeMode::halfline;
  double gs_tol = 1e-8;
  int gs_max_iters = 5000;
  double gs_step = 1.0;
  double gs_noise = 0.0;
  std::uint64_t rng_seed = 0;
  std::filesystem::path output_dir = "out";

  /// Keys present in the source file, in order of appearance.
  std::vector<std::string> keys;

  Grid grid() const { return Grid(L, n); }
};

/// Parses `key = value` lines; `#` starts a comment. Unknown or duplicate
/// keys and malformed values raise ParseError with the 1-based position.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Diagnostics {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

/// Schema, admissibility and grid checks plus a Robin/variance report on
/// the initial data the run would use.
Diagnostics validate(const ExperimentConfig& cfg);

struct Assertion {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation;  ///< how value is compared with tolerance, e.g. "<="
};

struct ExperimentSummary {
  std::string name;
  ExperimentKind kind = ExperimentKind::profile;
  std::vector<Assertion> assertions;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<std::string> labels;
  std::string status;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> artifacts;

  bool pass() const;
  std::optional<double> scalar(const std::string& key) const;
  std::string to_json() const;
};

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = true;
  bool write_artifacts = true;
};

/// Validates, runs and writes artifacts under <output_dir>/<name>/.
/// Throws ConfigurationError listing the validation errors.
ExperimentSummary run(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// psi_A(x) = A (1 + alpha x) exp(-x^2 / 2).
ComplexField blowup_family(double A, double alpha, const Grid& g);

/// Smallest A with E(psi_A) < 0: coarse upward scan, then bisection.
/// Throws PreconditionError when no amplitude up to 100 gives E < 0.
double blowup_threshold(const WaveParams& p, const Grid& g);

/// Sets one of omega, alpha, lambda, delta, A.
void set_parameter(ExperimentConfig& cfg, const std::string& param, double value);

/// Independent runs, one per value, plus `<output_dir>/<name>/sweep_<param>.csv`.
std::vector<ExperimentSummary> sweep(const ExperimentConfig& cfg, const std::string& param,
                                     const std::vector<double>& values, const RunOptions& opts = {});

/// Column order of the combined sweep CSV.
const std::vector<std::string>& sweep_columns();

}  // namespace dnls
