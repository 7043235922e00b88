#pragma once

// Frozen reference values. Computed once at 30 significant digits from the
// closed-form profile 2 w^{1/4} sech^{1/2}(2 sqrt(w) x + artanh(-a / sqrt(w)))
// by adaptive quadrature on [0, inf); independent of the library code.

#include <cmath>
#include <numbers>

namespace oracle {

struct ProfileValues {
  double omega;
  double alpha;
  double l2sq;
  double dxsq;
  double l6pow6;
  double trace0sq;
  double xmoment2;
  double xquartic;  // int x phi^4
  double S;
  double E;
  double phi0;
};

inline constexpr ProfileValues kFlat{1.0, 0.0, 3.1415926535897932, 1.5707963267948966, 25.132741228718346, 4.0,
                                     1.9378922925187388, 2.7725887222397812, 1.5707963267948966, 0.0, 2.0};

inline constexpr ProfileValues kAttractive{1.0, -0.5, 2.0943951023931955, 1.4802102530888171, 9.8269575888700548,
                                           3.4641016151377546, 1.1413632707312732, 1.1507282898071237,
                                           0.61418484930437842, -0.43301270189221932, 1.8612097182041992};

inline constexpr ProfileValues kRepulsive{1.0, 0.5, 4.188790204786391, 1.6613824005009762, 40.438524868566637,
                                          3.4641016151377546, 3.2083890628745346, 5.5451774444795625,
                                          2.5274078042854148, 0.43301270189221932, 1.8612097182041992};

inline constexpr ProfileValues kHalfOmega{0.5, -0.5, 1.5707963267948966, 0.64269908169872415, 2.2831853071795865,
                                          2.0, 1.6466932753910441, 0.63338873528149976, 0.14269908169872415, -0.25,
                                          1.414213562373095};

inline constexpr ProfileValues kDoubleOmega{2.0, -0.5, 2.4188584057763776, 3.0802962335425253, 28.11872924816368,
                                            5.2915026221291812, 0.67993708974919804, 1.5616556197853492,
                                            1.75742057801023, -0.66143782776614765, 2.300326633791206};

/// Analytic phi(x) and phi'(x) for x >= 0.
inline double phi(double omega, double alpha, double x) {
  const double theta = 2.0 * std::sqrt(omega) * x + std::atanh(-alpha / std::sqrt(omega));
  return 2.0 * std::pow(omega, 0.25) / std::sqrt(std::cosh(theta));
}

inline double dphi(double omega, double alpha, double x) {
  const double theta = 2.0 * std::sqrt(omega) * x + std::atanh(-alpha / std::sqrt(omega));
  return -2.0 * std::pow(omega, 0.75) * std::tanh(theta) / std::sqrt(std::cosh(theta));
}

inline constexpr double pi = std::numbers::pi;

}  // namespace oracle
