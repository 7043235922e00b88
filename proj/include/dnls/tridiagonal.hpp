#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <type_traits>
#include <vector>

#include "dnls/errors.hpp"

namespace dnls {

/// Thomas algorithm for a tridiagonal system. lower[0] and upper[n-1] are
/// ignored. Throws NumericalError on a vanishing pivot.
template <typename Coeff, typename Value>
std::vector<Value> solve_tridiagonal(std::span<const Coeff> lower, std::span<const Coeff> diag,
                                     std::span<const Coeff> upper, std::span<const Value> rhs) {
  const std::size_t n = diag.size();
  std::vector<Coeff> c(n);
  std::vector<Value> d(n);
  auto inverse = [](Coeff pivot) {
    const double mag = std::norm(pivot);
    if (mag == 0.0 || !std::isfinite(mag)) throw NumericalError("singular tridiagonal system");
    if constexpr (std::is_floating_point_v<Coeff>) {
      return 1.0 / pivot;
    } else {
      return std::conj(pivot) / mag;
    }
  };
  Coeff inv = inverse(diag[0]);
  c[0] = upper[0] * inv;
  d[0] = rhs[0] * inv;
  for (std::size_t i = 1; i < n; ++i) {
    inv = inverse(diag[i] - lower[i] * c[i - 1]);
    c[i] = i + 1 < n ? upper[i] * inv : Coeff{};
    d[i] = (rhs[i] - lower[i] * d[i - 1]) * inv;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
  return d;
}

}  // namespace dnls
