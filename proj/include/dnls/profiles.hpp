#pragma once

// Explicit standing waves phi(x) = 2 w^{1/4} sech^{1/2}(2 sqrt(w) x + artanh(-a/sqrt(w)))
// of the Robin problem, gauge transformations and the even extension.

#include "dnls/field.hpp"

namespace dnls {

/// Frequency omega and Robin coefficient alpha of the boundary condition
/// v_x(0) = alpha v(0).
struct WaveParams {
  double omega = 1.0;
  double alpha = 0.0;

  /// omega > alpha^2, the existence condition for the standing wave.
  bool admissible() const noexcept { return omega > alpha * alpha; }
};

/// Throws AdmissibilityError unless omega > alpha^2.
void require_admissible(const WaveParams& p);

/// Initial data with the two flags needed by the blow-up theorem: the Robin
/// condition holds numerically and x v is square integrable.
struct InitialData {
  ComplexField field;
  bool robin_compatible = false;
  bool finite_variance = false;
};

InitialData make_initial_data(ComplexField field, double alpha);

/// Phase shift theta_0 = artanh(-alpha/sqrt(omega)) of the profile argument.
double profile_shift(const WaveParams& p);

/// Samples the closed-form profile at |x_j|. Real and positive.
ComplexField standing_wave_profile(const WaveParams& p, const Grid& g);

/// Closed-form phi'(x) = -2 w^{3/4} sech^{1/2}(theta) tanh(theta) for x >= 0.
ComplexField standing_wave_derivative(const WaveParams& p, const Grid& g);

enum class BoundaryDerivative { analytic, finite_difference };

struct ProfileResidual {
  double ode_sup = 0.0;  ///< sup over interior nodes of |phi'' - w phi + (3/16) phi^5|
  double bc_err = 0.0;   ///< |phi'(0) - alpha phi(0)|
};

/// `analytic` uses the closed-form phi'(0) (valid only for fields produced by
/// standing_wave_profile with the same parameters).
ProfileResidual profile_residual(const ComplexField& phi, const WaveParams& p,
                                 BoundaryDerivative bc = BoundaryDerivative::finite_difference);

enum class GaugeDirection { forward, inverse };

/// u(x) = v(x) exp(-(i/4) int_x^L |v|^2 dy); the inverse applies the
/// conjugate phase.
ComplexField gauge_quarter(const ComplexField& v, GaugeDirection dir = GaugeDirection::forward,
                           QuadratureRule rule = QuadratureRule::simpson);

/// u(x) = v(x) exp((3i/4) int_L^x |v|^2 dy).
ComplexField gauge_three_quarter(const ComplexField& v, GaugeDirection dir = GaugeDirection::forward,
                                 QuadratureRule rule = QuadratureRule::simpson);

/// w(-x) = w(x) = v(x) on a centred grid over [-L, L] with 2n - 1 nodes.
ComplexField even_extension(const ComplexField& v);

}  // namespace dnls
