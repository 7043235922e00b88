#include "dnls/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "dnls/errors.hpp"
#include "json.hpp"

namespace dnls {

FunctionalReport evaluate(const Norms& nv, const WaveParams& p) {
  require_admissible(p);
  FunctionalReport r;
  r.omega = p.omega;
  r.alpha = p.alpha;
  r.trace0sq = nv.trace0sq;
  r.I = nv.xmoment2;
  r.M = 0.5 * nv.l2sq;
  r.E = 0.5 * nv.dxsq - nv.l6pow6 / 32.0 + 0.5 * p.alpha * nv.trace0sq;
  r.L = nv.dxsq + p.omega * nv.l2sq + p.alpha * nv.trace0sq;
  r.N = 3.0 / 16.0 * nv.l6pow6;
  r.S = 0.5 * (nv.dxsq + p.omega * nv.l2sq + p.alpha * nv.trace0sq) - nv.l6pow6 / 32.0;
  r.K = nv.dxsq + p.omega * nv.l2sq + p.alpha * nv.trace0sq - 3.0 / 16.0 * nv.l6pow6;
  r.P = nv.dxsq - nv.l6pow6 / 16.0 + 0.5 * p.alpha * nv.trace0sq;
  return r;
}

FunctionalReport evaluate(const ComplexField& v, const WaveParams& p, QuadratureRule rule) {
  require_admissible(p);
  return evaluate(norms(v, rule), p);
}

std::string to_json(const FunctionalReport& r) {
  nlohmann::ordered_json j;
  j["M"] = r.M;
  j["E"] = r.E;
  j["S"] = r.S;
  j["K"] = r.K;
  j["L"] = r.L;
  j["N"] = r.N;
  j["P"] = r.P;
  j["trace0sq"] = r.trace0sq;
  j["I"] = r.I;
  j["omega"] = r.omega;
  j["alpha"] = r.alpha;
  return j.dump(2);
}

ComplexField scale(const ComplexField& v, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("scaling factor must be positive");
  require_finite(v);
  const Grid& g = v.grid();
  const int n = g.n();
  const double h = g.h();
  const double amp = std::sqrt(lambda);
  ComplexField out(g);
  for (int j = 0; j < n; ++j) {
    // Position in index units of the sample point lambda * x_j.
    const double s = (lambda * g.x(j) - g.origin()) / h;
    if (s > (n - 1) * (1.0 + 1e-14)) continue;
    const double nearest = std::round(s);
    if (std::abs(s - nearest) <= 1e-12 * std::max(1.0, s)) {
      out[j] = amp * v[static_cast<int>(nearest)];
      continue;
    }
    int k0 = static_cast<int>(std::floor(s)) - 1;
    k0 = std::clamp(k0, 0, n - 4);
    cplx acc{};
    for (int a = 0; a < 4; ++a) {
      double basis = 1.0;
      for (int b = 0; b < 4; ++b) {
        if (b != a) basis *= (s - (k0 + b)) / static_cast<double>(a - b);
      }
      acc += basis * v[k0 + a];
    }
    out[j] = amp * acc;
  }
  return out;
}

double pohozaev_scaled(const Norms& nv, const WaveParams& p, double lambda) {
  return lambda * lambda * (nv.dxsq - nv.l6pow6 / 16.0) + lambda * 0.5 * p.alpha * nv.trace0sq;
}

double pohozaev_root(const ComplexField& v, const WaveParams& p) {
  require_admissible(p);
  const Norms nv = norms(v);
  const double quad = nv.dxsq - nv.l6pow6 / 16.0;
  const double lin = 0.5 * p.alpha * nv.trace0sq;
  const double pv = quad + lin;
  const double tol = 1e-9 * (std::abs(quad) + std::abs(lin) + 1e-300);
  if (pv > tol) throw PreconditionError("pohozaev_root requires P(v) <= 0");
  if (nv.trace0sq == 0.0) {
    throw DegenerateTraceError("v(0) = 0: lambda -> S(v_lambda) has no Pohozaev root in (0, 1]");
  }
  if (std::abs(pv) <= tol) return 1.0;
  const double root = -lin / quad;
  if (!(quad < 0.0) || !(root > 0.0) || root > 1.0) {
    throw PreconditionError("no Pohozaev root in (0, 1] (requires alpha > 0)");
  }
  return root;
}

double nehari_root(const FunctionalReport& r) {
  if (r.N <= 0.0) throw ZeroFieldError("nehari_root: N(v) = 0");
  if (r.L <= 0.0) throw PreconditionError("nehari_root requires L(v) > 0");
  return std::pow(r.L / r.N, 0.25);
}

double nehari_root(const ComplexField& v, const WaveParams& p) { return nehari_root(evaluate(v, p)); }

double coercivity_constant(const WaveParams& p) {
  require_admissible(p);
  // Smallest root of (1 - C)(w - C) = a^2.
  const double w = p.omega;
  const double a2 = p.alpha * p.alpha;
  const double root = 0.5 * ((1.0 + w) - std::sqrt((1.0 - w) * (1.0 - w) + 4.0 * a2));
  return 0.5 * root;
}

std::string to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::Aplus: return "Aplus";
    case RegionLabel::Aminus: return "Aminus";
    case RegionLabel::Bplus: return "Bplus";
    case RegionLabel::Bminus: return "Bminus";
    case RegionLabel::V: return "V";
    case RegionLabel::none: return "none";
  }
  return "none";
}

std::vector<RegionLabel> RegionSet::labels() const {
  std::vector<RegionLabel> out;
  for (auto l : {RegionLabel::Aplus, RegionLabel::Aminus, RegionLabel::Bplus, RegionLabel::Bminus, RegionLabel::V}) {
    if (contains(l)) out.push_back(l);
  }
  if (out.empty()) out.push_back(RegionLabel::none);
  return out;
}

std::string RegionSet::to_string() const {
  std::string s;
  for (auto l : labels()) {
    if (!s.empty()) s += '|';
    s += dnls::to_string(l);
  }
  return s;
}

RegionSet classify(const FunctionalReport& r, double d_omega) {
  if (!(d_omega > 0.0)) throw PreconditionError("classify requires d(omega) > 0");
  RegionSet set;
  if (r.M <= 0.0) return set;
  if (r.S < d_omega) {
    if (r.K > 0.0) set.insert(RegionLabel::Aplus);
    if (r.K < 0.0) set.insert(RegionLabel::Aminus);
    if (r.N < 3.0 * d_omega) set.insert(RegionLabel::Bplus);
    if (r.N > 3.0 * d_omega) set.insert(RegionLabel::Bminus);
    if (r.K < 0.0 && r.P < 0.0) set.insert(RegionLabel::V);
  }
  return set;
}

RegionSet classify(const ComplexField& v, const WaveParams& p, double d_omega) {
  return classify(evaluate(v, p), d_omega);
}

}  // namespace dnls
