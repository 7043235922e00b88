#include "dnls/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dnls/errors.hpp"
#include "dnls/functionals.hpp"
#include "dnls/tridiagonal.hpp"
#include "json.hpp"

namespace dnls {

DiscreteAction::DiscreteAction(const Grid& grid, const WaveParams& p, int trace_node, double trace_coeff)
    : grid_(grid),
      params_(p),
      trace_node_(trace_node),
      trace_coeff_(trace_coeff),
      weights_(quadrature_weights(grid, QuadratureRule::trapezoid)) {
  require_admissible(p);
  if (trace_node < 0 || trace_node >= grid.n()) throw DimensionError("trace node outside the grid");
  // The trace node of a line grid is interior and carries the full weight h.
}

DiscreteAction DiscreteAction::halfline(const Grid& grid, const WaveParams& p) {
  return DiscreteAction(grid, p, 0, p.alpha);
}

DiscreteAction DiscreteAction::line(const Grid& line_grid, const WaveParams& p) {
  if (line_grid.n() % 2 == 0) throw DimensionError("line grid needs an odd node count");
  return DiscreteAction(line_grid, p, line_grid.n() / 2, 2.0 * p.alpha);
}

DiscreteAction::Parts DiscreteAction::parts(std::span<const cplx> v) const {
  const int n = grid_.n();
  if (static_cast<int>(v.size()) != n) throw DimensionError("vector length does not match grid");
  const double h = grid_.h();
  Parts out;
  for (int j = 0; j + 1 < n; ++j) out.kinetic += std::norm(v[j + 1] - v[j]) / h;
  for (int j = 0; j < n; ++j) {
    const double a2 = std::norm(v[j]);
    out.mass += weights_[j] * a2;
    out.sextic += weights_[j] * a2 * a2 * a2;
  }
  out.trace = trace_coeff_ * std::norm(v[trace_node_]);
  out.L = out.kinetic + params_.omega * out.mass + out.trace;
  out.N = 3.0 / 16.0 * out.sextic;
  out.S = 0.5 * out.L - out.N / 6.0;
  out.K = out.L - out.N;
  return out;
}

std::vector<cplx> DiscreteAction::gradient(std::span<const cplx> v) const {
  const int n = grid_.n();
  const double h = grid_.h();
  std::vector<cplx> g(n);
  for (int j = 0; j < n; ++j) {
    cplx lap{};
    if (j > 0) lap += v[j] - v[j - 1];
    if (j + 1 < n) lap += v[j] - v[j + 1];
    g[j] = lap / (h * weights_[j]) + params_.omega * v[j] - 3.0 / 16.0 * std::pow(std::abs(v[j]), 4) * v[j];
  }
  g[trace_node_] += trace_coeff_ * v[trace_node_] / weights_[trace_node_];
  return g;
}

double DiscreteAction::inner(std::span<const cplx> a, std::span<const cplx> b) const {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += weights_[j] * std::real(std::conj(a[j]) * b[j]);
  return s;
}

std::vector<cplx> DiscreteAction::precondition(std::span<const cplx> g) const {
  const int n = grid_.n();
  const double h = grid_.h();
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const double s = 1.0 / (h * weights_[j]);
    if (j > 0) {
      lower[j] = -s;
      diag[j] += s;
    }
    if (j + 1 < n) {
      upper[j] = -s;
      diag[j] += s;
    }
    diag[j] += params_.omega;
  }
  diag[trace_node_] += trace_coeff_ / weights_[trace_node_];
  return solve_tridiagonal<double, cplx>(lower, diag, upper, g);
}

std::string to_string(MinimizeMode mode) {
  return mode == MinimizeMode::halfline ? "halfline" : "line_even";
}

ComplexField phase_align(const ComplexField& v) {
  int peak = 0;
  for (int j = 1; j < v.size(); ++j) {
    if (std::abs(v[j]) > std::abs(v[peak])) peak = j;
  }
  const double m = std::abs(v[peak]);
  if (m == 0.0) return v;
  return (std::conj(v[peak]) / m) * v;
}

namespace {

class NehariDescent {
 public:
  NehariDescent(const DiscreteAction& action, bool mirror) : action_(action), mirror_(mirror) {}

  // Amplitude rescaling onto K = 0; exact since K(t v) = t^2 L - t^6 N.
  std::vector<cplx> project(std::vector<cplx> v) const {
    if (mirror_) symmetrize(v);
    const auto p = action_.parts(v);
    if (!(p.N > 0.0) || !(p.L > 0.0) || !std::isfinite(p.N) || !std::isfinite(p.L)) {
      throw DegenerateDescentError("iterate left the region L > 0, N > 0 (collapse to the zero field)");
    }
    const double t = std::pow(p.L / p.N, 0.25);
    for (auto& z : v) z *= t;
    return v;
  }

  // Tangential gradient: the part of dS orthogonal to the scaling ray.
  std::vector<cplx> tangential_gradient(const std::vector<cplx>& v) const {
    auto g = action_.gradient(v);
    const double c = action_.inner(v, g) / action_.inner(v, v);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] -= c * v[j];
    return g;
  }

 private:
  void symmetrize(std::vector<cplx>& v) const {
    const int n = static_cast<int>(v.size());
    const int c = n / 2;
    for (int k = 1; k <= c; ++k) v[c - k] = v[c + k];
  }

  const DiscreteAction& action_;
  bool mirror_;
};

std::vector<cplx> initial_guess(const MinimizeConfig& cfg) {
  const Grid& g = cfg.grid;
  std::vector<cplx> v(g.n());
  if (cfg.initial) {
    if (!(cfg.initial->grid() == g)) throw DimensionError("initial field must live on the configured grid");
    require_finite(*cfg.initial);
    const auto vals = cfg.initial->values();
    std::copy(vals.begin(), vals.end(), v.begin());
  } else {
    // A e^{-x^2} with A = 2 omega^{1/4} so N > 0 and the bump sits at the
    // profile's scale.
    const double amp = 2.0 * std::pow(cfg.params.omega, 0.25);
    for (int j = 0; j < g.n(); ++j) v[j] = amp * std::exp(-g.x(j) * g.x(j));
  }
  if (cfg.noise > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& z : v) z *= 1.0 + cfg.noise * u(rng);
  }
  return v;
}

}  // namespace

MinimizeResult minimize(const MinimizeConfig& cfg) {
  require_admissible(cfg.params);
  if (!(cfg.tol > 0.0) || !(cfg.step > 0.0) || cfg.max_iters < 1) {
    throw ParameterError("minimize needs tol > 0, step > 0 and max_iters >= 1");
  }
  const bool line = cfg.mode == MinimizeMode::line_even;
  const std::vector<cplx> half = initial_guess(cfg);

  std::optional<Grid> line_grid;
  std::vector<cplx> v;
  if (line) {
    const ComplexField ext = even_extension(ComplexField(cfg.grid, half));
    line_grid = ext.grid();
    v.assign(ext.values().begin(), ext.values().end());
  } else {
    v = half;
  }
  const DiscreteAction action =
      line ? DiscreteAction::line(*line_grid, cfg.params) : DiscreteAction::halfline(cfg.grid, cfg.params);
  const NehariDescent descent(action, line);

  v = descent.project(std::move(v));
  double s = action.action(v);
  double tau = cfg.step;
  double residual = std::numeric_limits<double>::infinity();
  int it = 0;

  auto finish = [&](bool converged) {
    MinimizeResult r{phase_align(ComplexField(action.grid(), v)), 0.0, s, it, residual, cfg.mode, cfg.params};
    if (line) {
      const int c = action.trace_node();
      std::vector<cplx> right(r.minimizer.values().begin() + c, r.minimizer.values().end());
      r.value = 2.0 * evaluate(ComplexField(cfg.grid, std::move(right)), cfg.params).S;
    } else {
      r.value = evaluate(r.minimizer, cfg.params).S;
    }
    if (!converged) {
      throw ConvergenceError("minimize: residual " + std::to_string(residual) + " above tol after " +
                                 std::to_string(it) + " iterations",
                             std::move(r));
    }
    return r;
  };

  for (;; ++it) {
    const auto g = descent.tangential_gradient(v);
    residual = std::sqrt(action.inner(g, g));
    if (residual <= cfg.tol) return finish(true);
    if (it >= cfg.max_iters) return finish(false);

    const auto d = action.precondition(g);
    const double slope = action.inner(g, d);
    const double roundoff = 1e-14 * std::abs(s);
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      std::vector<cplx> trial(v.size());
      for (std::size_t j = 0; j < v.size(); ++j) trial[j] = v[j] - tau * d[j];
      trial = descent.project(std::move(trial));
      const double s_trial = action.action(trial);
      if (s_trial <= s - 1e-4 * tau * slope + roundoff) {
        v = std::move(trial);
        s = s_trial;
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) {
      // No descent left at working precision; the current iterate is as
      // stationary as the arithmetic allows.
      return finish(residual <= cfg.tol);
    }
    tau = std::min(cfg.step, 2.0 * tau);
  }
}

double d_ref(const WaveParams& p, const Grid& g) {
  return evaluate(standing_wave_profile(p, g), p).S;
}

LineRelation halfline_line_relation(const WaveParams& p, const Grid& g, double tol, int max_iters) {
  MinimizeConfig cfg;
  cfg.params = p;
  cfg.grid = g;
  cfg.tol = tol;
  cfg.max_iters = max_iters;
  cfg.mode = MinimizeMode::halfline;
  LineRelation rel;
  rel.d = minimize(cfg).value;
  cfg.mode = MinimizeMode::line_even;
  rel.d_tilde = minimize(cfg).value;
  rel.ratio = rel.d_tilde / rel.d;
  return rel;
}

std::string to_json(const MinimizeResult& r) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(r.mode);
  j["omega"] = r.params.omega;
  j["alpha"] = r.params.alpha;
  j["value"] = r.value;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  return j.dump(2);
}

}  // namespace dnls
