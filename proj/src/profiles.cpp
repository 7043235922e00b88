#include "dnls/profiles.hpp"

#include <cmath>
#include <sstream>

#include "dnls/errors.hpp"

namespace dnls {

void require_admissible(const WaveParams& p) {
  if (!std::isfinite(p.omega) || !std::isfinite(p.alpha) || !p.admissible()) {
    std::ostringstream msg;
    msg << "parameters not admissible: omega = " << p.omega << " must exceed alpha^2 = " << p.alpha * p.alpha;
    throw AdmissibilityError(msg.str());
  }
}

InitialData make_initial_data(ComplexField field, double alpha) {
  require_finite(field);
  InitialData data{std::move(field)};
  const ComplexField dv = differentiate_high_order(data.field);
  const double scale = std::max(1.0, data.field.max_abs());
  data.robin_compatible = std::abs(dv[0] - alpha * data.field[0]) <= 1e-4 * scale;
  data.finite_variance = std::isfinite(norms(data.field, QuadratureRule::trapezoid).xmoment2);
  return data;
}

double profile_shift(const WaveParams& p) {
  require_admissible(p);
  const double a = p.alpha / std::sqrt(p.omega);
  return 0.5 * std::log((1.0 - a) / (1.0 + a));
}

namespace {

// sech computed from exp(-|t|) so large arguments underflow instead of
// overflowing cosh.
double sech(double t) {
  const double e = std::exp(-std::abs(t));
  return 2.0 * e / (1.0 + e * e);
}

}  // namespace

ComplexField standing_wave_profile(const WaveParams& p, const Grid& g) {
  const double shift = profile_shift(p);
  const double amp = 2.0 * std::pow(p.omega, 0.25);
  const double k = 2.0 * std::sqrt(p.omega);
  ComplexField phi(g);
  for (int j = 0; j < g.n(); ++j) phi[j] = amp * std::sqrt(sech(k * std::abs(g.x(j)) + shift));
  return phi;
}

ComplexField standing_wave_derivative(const WaveParams& p, const Grid& g) {
  const double shift = profile_shift(p);
  const double amp = -2.0 * std::pow(p.omega, 0.75);
  const double k = 2.0 * std::sqrt(p.omega);
  ComplexField dphi(g);
  for (int j = 0; j < g.n(); ++j) {
    const double t = k * g.x(j) + shift;
    dphi[j] = amp * std::sqrt(sech(t)) * std::tanh(t);
  }
  return dphi;
}

ProfileResidual profile_residual(const ComplexField& phi, const WaveParams& p, BoundaryDerivative bc) {
  require_finite(phi);
  const int n = phi.size();
  const double h = phi.grid().h();
  ProfileResidual r;
  for (int j = 1; j < n - 1; ++j) {
    const cplx dxx = (phi[j + 1] - 2.0 * phi[j] + phi[j - 1]) / (h * h);
    const cplx res = dxx - p.omega * phi[j] + (3.0 / 16.0) * std::pow(std::abs(phi[j]), 4) * phi[j];
    r.ode_sup = std::max(r.ode_sup, std::abs(res));
  }
  cplx d0;
  if (bc == BoundaryDerivative::analytic) {
    const double t = profile_shift(p);
    d0 = -2.0 * std::pow(p.omega, 0.75) * std::sqrt(sech(t)) * std::tanh(t);
  } else {
    d0 = differentiate_high_order(phi)[0];
  }
  r.bc_err = std::abs(d0 - p.alpha * phi[0]);
  return r;
}

namespace {

// Multiplies v by exp(-i c T(x)), T the tail integral of |v|^2.
ComplexField tail_phase(const ComplexField& v, double c, QuadratureRule rule) {
  require_finite(v);
  std::vector<double> dens(v.size());
  for (int j = 0; j < v.size(); ++j) dens[j] = std::norm(v[j]);
  const auto tail = tail_integral(v.grid(), dens, rule);
  ComplexField u(v.grid());
  for (int j = 0; j < v.size(); ++j) u[j] = v[j] * std::polar(1.0, -c * tail[j]);
  return u;
}

}  // namespace

ComplexField gauge_quarter(const ComplexField& v, GaugeDirection dir, QuadratureRule rule) {
  return tail_phase(v, dir == GaugeDirection::forward ? 0.25 : -0.25, rule);
}

ComplexField gauge_three_quarter(const ComplexField& v, GaugeDirection dir, QuadratureRule rule) {
  return tail_phase(v, dir == GaugeDirection::forward ? 0.75 : -0.75, rule);
}

ComplexField even_extension(const ComplexField& v) {
  require_finite(v);
  const Grid& g = v.grid();
  const int n = g.n();
  const Grid line(2.0 * g.length(), 2 * n - 1, -g.length());
  ComplexField w(line);
  for (int j = 0; j < n; ++j) {
    w[n - 1 + j] = v[j];
    w[n - 1 - j] = v[j];
  }
  return w;
}

}  // namespace dnls
