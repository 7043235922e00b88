#pragma once

// Minimization of the action S_w on the Nehari manifold {K_w = 0}, on the
// half-line or over even fields on the whole line.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dnls/errors.hpp"
#include "dnls/field.hpp"
#include "dnls/profiles.hpp"

namespace dnls {

/// Discrete action with trapezoid weights and forward differences:
///
///   kinetic = sum_j |v_{j+1} - v_j|^2 / h     mass = sum_j w_j |v_j|^2
///   sextic  = sum_j w_j |v_j|^6               trace = c |v_m|^2
///
/// with (m, c) = (0, alpha) on the half-line and (centre, 2 alpha) on the
/// line. Its weighted gradient reproduces the Robin-ghost Laplacian used
/// by the time stepper.
class DiscreteAction {
 public:
  struct Parts {
    double kinetic = 0.0;
    double mass = 0.0;
    double sextic = 0.0;
    double trace = 0.0;
    double L = 0.0;
    double N = 0.0;
    double S = 0.0;
    double K = 0.0;
  };

  DiscreteAction(const Grid& grid, const WaveParams& p, int trace_node, double trace_coeff);

  static DiscreteAction halfline(const Grid& grid, const WaveParams& p);
  /// `line_grid` must be centred with an odd node count (trace at the middle).
  static DiscreteAction line(const Grid& line_grid, const WaveParams& p);

  Parts parts(std::span<const cplx> v) const;
  double action(std::span<const cplx> v) const { return parts(v).S; }

  /// Riesz representative g of dS in the weighted inner product:
  /// dS[e] = Re sum_j w_j conj(g_j) e_j.
  std::vector<cplx> gradient(std::span<const cplx> v) const;

  /// Re sum_j w_j conj(a_j) b_j.
  double inner(std::span<const cplx> a, std::span<const cplx> b) const;

  /// Solves (Hessian of L/2) p = g: a Robin-Laplacian shifted by omega.
  std::vector<cplx> precondition(std::span<const cplx> g) const;

  const Grid& grid() const noexcept { return grid_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  int trace_node() const noexcept { return trace_node_; }

 private:
  Grid grid_;
  WaveParams params_;
  int trace_node_;
  double trace_coeff_;
  std::vector<double> weights_;
};

enum class MinimizeMode { halfline, line_even };

std::string to_string(MinimizeMode mode);

struct MinimizeConfig {
  MinimizeMode mode = MinimizeMode::halfline;
  WaveParams params;
  Grid grid{20.0, 2001};  ///< half-line grid; line_even mirrors it onto [-L, L]
  double step = 1.0;      ///< initial trial step of the backtracking search
  double tol = 1e-8;
  int max_iters = 2000;
  std::uint64_t seed = 0;
  double noise = 0.0;  ///< multiplicative noise amplitude on the Gaussian start
  std::optional<ComplexField> initial;  ///< on `grid`; Gaussian bump when absent
};

struct MinimizeResult {
  ComplexField minimizer;  ///< half-line grid or centred line grid, per mode
  double value = 0.0;      ///< S at the minimizer by evaluate() (both halves in line mode)
  double discrete_value = 0.0;  ///< the minimized discrete action
  int iterations = 0;
  double residual = 0.0;   ///< weighted L^2 norm of the tangential gradient
  MinimizeMode mode = MinimizeMode::halfline;
  WaveParams params;
};

/// Thrown when max_iters is reached; carries the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, MinimizeResult last)
      : Error(what), last_(std::move(last)) {}
  const MinimizeResult& last() const noexcept { return last_; }

 private:
  MinimizeResult last_;
};

/// Iterate collapsed to zero (N -> 0) or left the finite range.
class DegenerateDescentError : public Error {
 public:
  using Error::Error;
};

MinimizeResult minimize(const MinimizeConfig& cfg);

/// S at the explicit profile, evaluated by quadrature.
double d_ref(const WaveParams& p, const Grid& g);

struct LineRelation {
  double d = 0.0;
  double d_tilde = 0.0;
  double ratio = 0.0;
};

LineRelation halfline_line_relation(const WaveParams& p, const Grid& g, double tol = 1e-8,
                                    int max_iters = 5000);

/// JSON {mode, omega, alpha, value, iterations, residual}.
std::string to_json(const MinimizeResult& r);

/// Multiplies by a unit phase so the value of largest modulus is real positive.
ComplexField phase_align(const ComplexField& v);

}  // namespace dnls
