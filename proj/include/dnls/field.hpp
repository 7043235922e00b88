#pragma once

// Uniform-grid complex fields on a truncated half-line [0, L]: quadrature,
// finite differences, norms and CSV serialization.

#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace dnls {

using cplx = std::complex<double>;

enum class QuadratureRule { trapezoid, simpson };

/// Uniform mesh x_j = origin + j*h, j = 0..n-1, h = length/(n-1).
///
/// Half-line grids have origin 0. Whole-line grids (used by the even
/// extension) are centred, origin = -length/2.
class Grid {
 public:
  Grid(double length, int n, double origin = 0.0);

  double length() const noexcept { return length_; }
  int n() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  double origin() const noexcept { return origin_; }
  double x(int j) const noexcept { return origin_ + j * h_; }
  std::vector<double> nodes() const;

  bool operator==(const Grid& other) const noexcept;

 private:
  double length_;
  int n_;
  double h_;
  double origin_;
};

/// Samples v(x_j) of a complex function on a Grid.
class ComplexField {
 public:
  explicit ComplexField(const Grid& grid);
  ComplexField(const Grid& grid, std::vector<cplx> values);

  const Grid& grid() const noexcept { return grid_; }
  int size() const noexcept { return grid_.n(); }

  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }
  cplx operator[](int j) const { return values_[j]; }
  cplx& operator[](int j) { return values_[j]; }

  bool is_finite() const noexcept;
  double max_abs() const noexcept;

  ComplexField& operator+=(const ComplexField& other);
  ComplexField& operator-=(const ComplexField& other);
  ComplexField& operator*=(cplx s);

 private:
  Grid grid_;
  std::vector<cplx> values_;
};

ComplexField operator+(ComplexField a, const ComplexField& b);
ComplexField operator-(ComplexField a, const ComplexField& b);
ComplexField operator*(cplx s, ComplexField a);

/// Throws InvalidStateError when the field holds NaN or Inf.
void require_finite(const ComplexField& v);

/// Composite quadrature weights; Simpson needs an odd node count.
std::vector<double> quadrature_weights(const Grid& grid, QuadratureRule rule);

double integrate(const Grid& grid, std::span<const double> f,
                 QuadratureRule rule = QuadratureRule::simpson);
cplx integrate(const Grid& grid, std::span<const cplx> f,
               QuadratureRule rule = QuadratureRule::simpson);

/// T_j = integral of f over [x_j, x_{n-1}], accumulated from the right end.
std::vector<double> tail_integral(const Grid& grid, std::span<const double> f,
                                  QuadratureRule rule = QuadratureRule::simpson);

/// Second-order finite differences. Centered in the interior; at x = 0 the
/// ghost value v_{-1} = v_1 - 2 h alpha v_0 is used when robin_alpha is
/// given (so the node-0 derivative is exactly alpha v_0), otherwise a
/// one-sided stencil. One-sided at the right end.
ComplexField differentiate(const ComplexField& v, std::optional<double> robin_alpha = std::nullopt);

/// Sixth-order finite-difference derivative (one-sided closures near both
/// ends). Used for the H^1 seminorm where second order is too coarse.
ComplexField differentiate_high_order(const ComplexField& v);

/// Finite-difference weights for the m-th derivative at z from the nodes xs
/// (Fornberg's recursion).
std::vector<double> fd_weights(double z, std::span<const double> xs, int m);

struct Norms {
  double l2sq = 0.0;      ///< ||v||^2_{L^2}
  double l6pow6 = 0.0;    ///< ||v||^6_{L^6}
  double dxsq = 0.0;      ///< ||v_x||^2_{L^2}
  double h1sq = 0.0;      ///< ||v_x||^2 + ||v||^2
  double trace0sq = 0.0;  ///< |v(0)|^2
  double xmoment2 = 0.0;  ///< integral of x^2 |v|^2
};

Norms norms(const ComplexField& v, QuadratureRule rule = QuadratureRule::simpson);

/// <a, b>_{H^1} = int a conj(b) + a_x conj(b_x) dx.
cplx h1_inner(const ComplexField& a, const ComplexField& b,
              QuadratureRule rule = QuadratureRule::simpson);

/// CSV with header `x,re,im`, 17 significant digits.
void write_csv(std::ostream& os, const ComplexField& v);
ComplexField read_csv(std::istream& is);

}  // namespace dnls
