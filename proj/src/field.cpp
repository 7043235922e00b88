#include "dnls/field.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dnls/errors.hpp"

namespace dnls {

Grid::Grid(double length, int n, double origin) : length_(length), n_(n), origin_(origin) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ConfigurationError("grid length must be positive and finite");
  }
  if (n < 3) {
    throw DimensionError("grid needs at least 3 nodes, got " + std::to_string(n));
  }
  h_ = length / (n - 1);
}

std::vector<double> Grid::nodes() const {
  std::vector<double> xs(n_);
  for (int j = 0; j < n_; ++j) xs[j] = x(j);
  return xs;
}

bool Grid::operator==(const Grid& other) const noexcept {
  return n_ == other.n_ && length_ == other.length_ && origin_ == other.origin_;
}

ComplexField::ComplexField(const Grid& grid) : grid_(grid), values_(grid.n(), cplx{}) {}

ComplexField::ComplexField(const Grid& grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.n()) {
    throw DimensionError("field has " + std::to_string(values_.size()) + " values for a grid of " +
                         std::to_string(grid_.n()) + " nodes");
  }
}

bool ComplexField::is_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double ComplexField::max_abs() const noexcept {
  double m = 0.0;
  for (cplx z : values_) m = std::max(m, std::abs(z));
  return m;
}

namespace {

void require_same_grid(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid() == b.grid())) throw DimensionError("fields live on different grids");
}

}  // namespace

ComplexField& ComplexField::operator+=(const ComplexField& other) {
  require_same_grid(*this, other);
  for (int j = 0; j < size(); ++j) values_[j] += other.values_[j];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& other) {
  require_same_grid(*this, other);
  for (int j = 0; j < size(); ++j) values_[j] -= other.values_[j];
  return *this;
}

ComplexField& ComplexField::operator*=(cplx s) {
  for (cplx& z : values_) z *= s;
  return *this;
}

ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
ComplexField operator*(cplx s, ComplexField a) { return a *= s; }

void require_finite(const ComplexField& v) {
  if (!v.is_finite()) throw InvalidStateError("field contains non-finite values");
}

std::vector<double> quadrature_weights(const Grid& grid, QuadratureRule rule) {
  const int n = grid.n();
  const double h = grid.h();
  std::vector<double> w(n, h);
  if (rule == QuadratureRule::trapezoid) {
    w.front() = w.back() = 0.5 * h;
    return w;
  }
  if (n % 2 == 0) {
    throw ConfigurationError("Simpson rule needs an odd node count, got n = " + std::to_string(n));
  }
  for (int j = 0; j < n; ++j) w[j] = (j % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
  w.front() = w.back() = h / 3.0;
  return w;
}

namespace {

template <typename T>
T integrate_impl(const Grid& grid, std::span<const T> f, QuadratureRule rule) {
  if (static_cast<int>(f.size()) != grid.n()) {
    throw DimensionError("integrand length " + std::to_string(f.size()) + " does not match grid (" +
                         std::to_string(grid.n()) + ")");
  }
  const auto w = quadrature_weights(grid, rule);
  T sum{};
  for (int j = 0; j < grid.n(); ++j) sum += w[j] * f[j];
  return sum;
}

}  // namespace

double integrate(const Grid& grid, std::span<const double> f, QuadratureRule rule) {
  return integrate_impl(grid, f, rule);
}

cplx integrate(const Grid& grid, std::span<const cplx> f, QuadratureRule rule) {
  return integrate_impl(grid, f, rule);
}

std::vector<double> tail_integral(const Grid& grid, std::span<const double> f,
                                  QuadratureRule rule) {
  const int n = grid.n();
  if (static_cast<int>(f.size()) != n) throw DimensionError("integrand length does not match grid");
  const double h = grid.h();
  std::vector<double> tail(n, 0.0);
  if (rule == QuadratureRule::trapezoid) {
    for (int j = n - 2; j >= 0; --j) tail[j] = tail[j + 1] + 0.5 * h * (f[j] + f[j + 1]);
    return tail;
  }
  // Simpson panels anchored at the right end; the single interval left over
  // at odd offsets uses the three-point rule on [x_j, x_{j+1}].
  for (int j = n - 2; j >= 0; --j) {
    const int offset = n - 1 - j;
    if (offset % 2 == 0) {
      tail[j] = tail[j + 2] + h / 3.0 * (f[j] + 4.0 * f[j + 1] + f[j + 2]);
    } else if (j + 2 <= n - 1) {
      tail[j] = tail[j + 1] + h / 12.0 * (5.0 * f[j] + 8.0 * f[j + 1] - f[j + 2]);
    } else {
      tail[j] = tail[j + 1] + h / 12.0 * (-f[j - 1] + 8.0 * f[j] + 5.0 * f[j + 1]);
    }
  }
  return tail;
}

ComplexField differentiate(const ComplexField& v, std::optional<double> robin_alpha) {
  const int n = v.size();
  if (n < 3) throw DimensionError("differentiation needs n >= 3");
  const double h = v.grid().h();
  ComplexField d(v.grid());
  for (int j = 1; j < n - 1; ++j) d[j] = (v[j + 1] - v[j - 1]) / (2.0 * h);
  if (robin_alpha) {
    const cplx ghost = v[1] - 2.0 * h * *robin_alpha * v[0];
    d[0] = (v[1] - ghost) / (2.0 * h);
  } else {
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  }
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return d;
}

std::vector<double> fd_weights(double z, std::span<const double> xs, int m) {
  const int np = static_cast<int>(xs.size());
  if (np == 0 || m < 0 || m >= np) throw ParameterError("fd_weights: need more nodes than the derivative order");
  // c[i][k]: weight of node i for the k-th derivative.
  std::vector<std::vector<double>> c(np, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < np; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(np);
  for (int i = 0; i < np; ++i) w[i] = c[i][m];
  return w;
}

ComplexField differentiate_high_order(const ComplexField& v) {
  constexpr int kWidth = 7;
  const int n = v.size();
  if (n < kWidth) return differentiate(v);
  const double h = v.grid().h();
  ComplexField d(v.grid());

  static const std::vector<double> centred = [] {
    const double xs[kWidth] = {-3, -2, -1, 0, 1, 2, 3};
    return fd_weights(0.0, xs, 1);
  }();
  // Left closures for nodes 0, 1, 2 on stencil 0..6; the right end mirrors
  // them with a sign flip.
  static const std::vector<std::vector<double>> closures = [] {
    const double xs[kWidth] = {0, 1, 2, 3, 4, 5, 6};
    std::vector<std::vector<double>> out;
    for (int j = 0; j < 3; ++j) out.push_back(fd_weights(static_cast<double>(j), xs, 1));
    return out;
  }();

  for (int j = 3; j < n - 3; ++j) {
    cplx s{};
    for (int k = 0; k < kWidth; ++k) s += centred[k] * v[j - 3 + k];
    d[j] = s / h;
  }
  for (int j = 0; j < 3; ++j) {
    cplx left{};
    cplx right{};
    for (int k = 0; k < kWidth; ++k) {
      left += closures[j][k] * v[k];
      right -= closures[j][k] * v[n - 1 - k];
    }
    d[j] = left / h;
    d[n - 1 - j] = right / h;
  }
  return d;
}

Norms norms(const ComplexField& v, QuadratureRule rule) {
  require_finite(v);
  const Grid& g = v.grid();
  const int n = v.size();
  const auto w = quadrature_weights(g, rule);
  const ComplexField dv = differentiate_high_order(v);
  Norms out;
  for (int j = 0; j < n; ++j) {
    const double a2 = std::norm(v[j]);
    const double x = g.x(j);
    out.l2sq += w[j] * a2;
    out.l6pow6 += w[j] * a2 * a2 * a2;
    out.dxsq += w[j] * std::norm(dv[j]);
    out.xmoment2 += w[j] * x * x * a2;
  }
  out.h1sq = out.dxsq + out.l2sq;
  out.trace0sq = std::norm(v[0]);
  return out;
}

cplx h1_inner(const ComplexField& a, const ComplexField& b, QuadratureRule rule) {
  require_same_grid(a, b);
  const auto w = quadrature_weights(a.grid(), rule);
  const ComplexField da = differentiate_high_order(a);
  const ComplexField db = differentiate_high_order(b);
  cplx s{};
  for (int j = 0; j < a.size(); ++j) s += w[j] * (a[j] * std::conj(b[j]) + da[j] * std::conj(db[j]));
  return s;
}

void write_csv(std::ostream& os, const ComplexField& v) {
  const auto old_precision = os.precision();
  os << "x,re,im\n" << std::setprecision(17);
  for (int j = 0; j < v.size(); ++j) {
    os << v.grid().x(j) << ',' << v[j].real() << ',' << v[j].imag() << '\n';
  }
  os.precision(old_precision);
}

ComplexField read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,re,im", 0) != 0) {
    throw ParseError("expected header x,re,im", 1, 1);
  }
  std::vector<double> xs;
  std::vector<cplx> vals;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell[3];
    for (auto& c : cell) {
      if (!std::getline(row, c, ',')) throw ParseError("expected three columns", lineno, 1);
    }
    try {
      xs.push_back(std::stod(cell[0]));
      vals.emplace_back(std::stod(cell[1]), std::stod(cell[2]));
    } catch (const std::exception&) {
      throw ParseError("non-numeric entry", lineno, 1);
    }
  }
  if (xs.size() < 3) throw DimensionError("field CSV needs at least 3 rows");
  const int n = static_cast<int>(xs.size());
  Grid grid(xs.back() - xs.front(), n, xs.front());
  for (int j = 0; j < n; ++j) {
    if (std::abs(xs[j] - grid.x(j)) > 1e-9 * std::max(1.0, grid.length())) {
      throw ParseError("nodes are not uniformly spaced", j + 2, 1);
    }
  }
  return ComplexField(grid, std::move(vals));
}

}  // namespace dnls
