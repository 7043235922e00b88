#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dnls/field.hpp"
#include "dnls/profiles.hpp"

namespace dnls {

/// Every scalar functional of a half-line field at fixed (omega, alpha).
///
///   M = 1/2 ||v||^2                     L = ||v_x||^2 + w ||v||^2 + a |v(0)|^2
///   E = 1/2 ||v_x||^2 - 1/32 ||v||_6^6 + a/2 |v(0)|^2
///   N = 3/16 ||v||_6^6                  S = L/2 - N/6,   K = L - N
///   P = ||v_x||^2 - 1/16 ||v||_6^6 + a/2 |v(0)|^2
///   I = int x^2 |v|^2
struct FunctionalReport {
  double M = 0.0;
  double E = 0.0;
  double S = 0.0;
  double K = 0.0;
  double L = 0.0;
  double N = 0.0;
  double P = 0.0;
  double trace0sq = 0.0;
  double I = 0.0;
  double omega = 0.0;
  double alpha = 0.0;
};

FunctionalReport evaluate(const ComplexField& v, const WaveParams& p,
                          QuadratureRule rule = QuadratureRule::simpson);

/// Same report from precomputed norms.
FunctionalReport evaluate(const Norms& nv, const WaveParams& p);

/// Flat JSON object with keys M,E,S,K,L,N,P,trace0sq,I,omega,alpha.
std::string to_json(const FunctionalReport& r);

/// v_lambda(x) = lambda^{1/2} v(lambda x), by four-point cubic interpolation
/// onto the same grid; samples beyond the right end read as zero.
ComplexField scale(const ComplexField& v, double lambda);

/// P(v_lambda) from the exact scaling law
/// lambda^2 (||v_x||^2 - ||v||_6^6/16) + lambda a/2 |v(0)|^2.
double pohozaev_scaled(const Norms& nv, const WaveParams& p, double lambda);

/// Root lambda_0 in (0, 1] of lambda -> P(v_lambda). Requires P(v) <= 0
/// and v(0) != 0; equals 1 when P(v) vanishes.
double pohozaev_root(const ComplexField& v, const WaveParams& p);

/// lambda* = (L/N)^{1/4}, the amplitude factor with K(lambda* v) = 0.
double nehari_root(const ComplexField& v, const WaveParams& p);
double nehari_root(const FunctionalReport& r);

/// Largest constant produced by the Young-inequality split with
/// L(v) >= C ||v||^2_{H^1}; positive exactly when omega > alpha^2.
/// Returns half of the critical root so the inequality is strict.
double coercivity_constant(const WaveParams& p);

enum class RegionLabel : std::uint8_t { Aplus, Aminus, Bplus, Bminus, V, none };

std::string to_string(RegionLabel label);

/// The variational regions a field belongs to, at reference level d:
///   A+ : S < d, K > 0       A- : S < d, K < 0
///   B+ : S < d, N < 3d      B- : S < d, N > 3d
///   V  : K < 0, P < 0, S < d
class RegionSet {
 public:
  void insert(RegionLabel label) { bits_ |= bit(label); }
  bool contains(RegionLabel label) const { return (bits_ & bit(label)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::vector<RegionLabel> labels() const;
  std::string to_string() const;  ///< e.g. "Aminus|Bminus|V", "none"
  bool operator==(const RegionSet&) const = default;

 private:
  static std::uint8_t bit(RegionLabel label) { return static_cast<std::uint8_t>(1u << static_cast<int>(label)); }
  std::uint8_t bits_ = 0;
};

RegionSet classify(const FunctionalReport& r, double d_omega);
RegionSet classify(const ComplexField& v, const WaveParams& p, double d_omega);

}  // namespace dnls
