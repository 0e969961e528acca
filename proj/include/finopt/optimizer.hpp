#pragma once

// Numerical rediscovery of the optimal fin.
//
// Inner loop: optimality-criteria (OC) iteration on the face thicknesses at
// a fixed length under the equality constraint sum t_f dx = A. Stationarity
// of the Lagrangian with respect to t_f reads D_f = lambda with
// D_f = k (dtheta/dx)(dw/dx) the compliance sensitivity density, so each
// face is rescaled by (D_f / lambda)^eta, clipped to a move limit and the
// thickness floor. lambda is found by bisection so the area is exactly A.
//
// Outer loop: golden-section search on L over the inner optimum.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "finopt/analytic.hpp"
#include "finopt/errors.hpp"
#include "finopt/golden_section.hpp"
#include "finopt/mesh.hpp"
#include "finopt/problem.hpp"
#include "finopt/sensitivity.hpp"
#include "finopt/solver.hpp"

namespace finopt {

struct OptimizerOptions {
  std::size_t n_cells = 1000;
  std::size_t max_inner_iters = 500;
  double oc_damping = 0.5;          ///< eta in (0, 1]
  double move_limit = 0.2;          ///< max relative face change per iteration
  double lambda_bisect_tol = 1e-10; ///< relative area tolerance
  double converge_tol = 1e-8;       ///< max relative face change to stop
  /// Outer search interval; defaults to [0.3, 3] x cbrt(3kA/h).
  std::optional<std::pair<double, double>> length_bracket;
  /// Outer search resolution; defaults to 1e-4 x cbrt(3kA/h).
  std::optional<double> length_tol;
  /// Starting face thicknesses; defaults to the constant profile A / L.
  std::optional<std::vector<double>> initial_thickness;

  void validate() const {
    if (n_cells < Mesh::min_cells) throw DomainError("n_cells must be at least 4");
    if (max_inner_iters == 0) throw DomainError("max_inner_iters must be positive");
    if (!(oc_damping > 0.0 && oc_damping <= 1.0)) throw DomainError("oc_damping must lie in (0, 1]");
    if (!(move_limit > 0.0 && move_limit < 1.0)) throw DomainError("move_limit must lie in (0, 1)");
    if (!(lambda_bisect_tol > 0.0)) throw DomainError("lambda_bisect_tol must be positive");
    if (!(converge_tol > 0.0)) throw DomainError("converge_tol must be positive");
    if (length_bracket) {
      const auto [lo, hi] = *length_bracket;
      if (!(lo > 0.0 && hi > lo && std::isfinite(hi))) throw DomainError("length bracket must satisfy 0 < lo < hi");
    }
    if (length_tol && !(*length_tol > 0.0)) throw DomainError("length_tol must be positive");
  }
};

struct IterationRecord {
  double compliance = 0.0;
  double area_error = 0.0;  ///< |area - A| / A
  double max_change = 0.0;  ///< max_f |t_new - t_old| / t_old
};

/// Discrete residuals of the four optimality conditions, plus the slope
/// and mean-gradient comparisons against the closed form.
struct OptimalityCheck {
  double grad_temp_cv = 0.0;                    ///< CV of dtheta/dx, active interior faces
  double thickness_grad_linfit_residual = 0.0;  ///< ||dt/dx - (2h/k)(x-L)|| / ||(2h/k)(x-L)||
  double tip_temp_ratio = 0.0;                  ///< theta(L) / theta_0
  double selfadjoint_gap = 0.0;                 ///< max |w - theta| / theta_0
  double temp_grad_mean_ratio = 0.0;            ///< mean dtheta/dx / (-q0 / (h L^2))
  double thickness_slope_ratio = 0.0;           ///< fitted d2t/dx2 / (2h/k)
  std::size_t active_faces = 0;                 ///< faces above the thickness floor
};

struct OptimizationReport {
  ThicknessProfile profile;
  TemperatureField temperature;
  double length = 0.0;
  double compliance = 0.0;
  double lagrange_multiplier = 0.0;
  std::size_t inner_iterations = 0;
  bool converged = false;
  std::vector<IterationRecord> history;  ///< entry 0 is the initial design
  OptimalityCheck optimality;
  std::size_t length_evaluations = 0;    ///< inner optimisations run by the outer search
};

namespace detail {

inline bool is_active_face(double t, double floor) { return t > floor * (1.0 + 1e-9); }

}  // namespace detail

inline OptimalityCheck verify_optimality(const FinProblem& p, const ThicknessProfile& profile,
                                         const TemperatureField& theta) {
  p.validate();
  if (!(p.q0 > 0.0)) throw DomainError("optimality metrics need q0 > 0");
  if (!(theta.mesh() == profile.mesh())) throw DomainError("field and profile live on different meshes");
  const Mesh& mesh = profile.mesh();
  const std::size_t n = mesh.cells();
  const double L = mesh.length();
  const double dx = mesh.spacing();
  const double floor = thickness_floor(p, L);
  const double theta0 = theta.root_value();

  OptimalityCheck c;

  std::vector<bool> active(n);
  for (std::size_t f = 0; f < n; ++f) active[f] = detail::is_active_face(profile[f], floor);
  c.active_faces = static_cast<std::size_t>(std::count(active.begin(), active.end(), true));

  // Constant temperature gradient.
  std::vector<double> grads;
  for (std::size_t f = 1; f + 1 < n; ++f)
    if (active[f]) grads.push_back(theta.gradient(f));
  if (grads.size() < 2) throw DomainError("too few active interior faces to assess optimality");
  const double count = static_cast<double>(grads.size());
  const double mean = std::accumulate(grads.begin(), grads.end(), 0.0) / count;
  double var = 0.0;
  for (double g : grads) var += (g - mean) * (g - mean);
  var /= count;
  c.grad_temp_cv = std::sqrt(var) / std::abs(mean);
  c.temp_grad_mean_ratio = mean / (-p.q0 / (p.h * L * L));

  // Linear thickness gradient, evaluated at nodes between two active faces.
  const double slope = 2.0 * p.h / p.k;
  double res_sq = 0.0, ref_sq = 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (!active[i - 1] || !active[i]) continue;
    const double x = mesh.node(i);
    const double dtdx = (profile[i] - profile[i - 1]) / dx;
    const double target = slope * (x - L);
    res_sq += (dtdx - target) * (dtdx - target);
    ref_sq += target * target;
    sx += x;
    sy += dtdx;
    sxx += x * x;
    sxy += x * dtdx;
    ++m;
  }
  if (m < 2) throw DomainError("too few active nodes to fit the thickness gradient");
  c.thickness_grad_linfit_residual = std::sqrt(res_sq / ref_sq);
  const double dm = static_cast<double>(m);
  const double fitted = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
  c.thickness_slope_ratio = fitted / slope;

  c.tip_temp_ratio = std::abs(theta.tip_value()) / theta0;

  const AdjointField w = solve_adjoint(p, profile);
  double gap = 0.0;
  for (std::size_t i = 0; i < mesh.nodes(); ++i) gap = std::max(gap, std::abs(w[i] - theta[i]));
  c.selfadjoint_gap = gap / theta0;
  return c;
}

inline OptimalityCheck verify_optimality(const OptimizationReport& report, const FinProblem& p) {
  return verify_optimality(p, report.profile, report.temperature);
}

/// Pass/fail limits applied to an OptimalityCheck and resistance split.
struct OptimalityThresholds {
  double max_grad_temp_cv = 1e-2;
  double max_tip_temp_ratio = 2e-2;
  double max_selfadjoint_gap = 1e-10;
  double max_linfit_residual = 2e-2;
  double slope_tolerance = 2e-2;       ///< |slope ratio - 1|
  double biot_tolerance = 5e-2;        ///< |Bi - 1|
};

struct ConditionResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

inline std::vector<ConditionResult> evaluate_conditions(const OptimalityCheck& c, double biot,
                                                        const OptimalityThresholds& t = {}) {
  auto le = [](std::string name, double v, double lim) {
    return ConditionResult{std::move(name), v, lim, v <= lim};
  };
  return {
      le("selfadjoint_gap", c.selfadjoint_gap, t.max_selfadjoint_gap),
      le("grad_temp_cv", c.grad_temp_cv, t.max_grad_temp_cv),
      le("thickness_grad_linfit_residual", c.thickness_grad_linfit_residual, t.max_linfit_residual),
      le("thickness_slope_error", std::abs(c.thickness_slope_ratio - 1.0), t.slope_tolerance),
      le("tip_temp_ratio", c.tip_temp_ratio, t.max_tip_temp_ratio),
      le("biot_error", std::abs(biot - 1.0), t.biot_tolerance),
  };
}

namespace detail {

struct OcStep {
  std::vector<double> thickness;
  double lambda = 0.0;
  double area_error = 0.0;
  double max_change = 0.0;
};

/// One OC update. Sensitivity densities are normalised by their maximum
/// before the multiplier search, so scaling the load leaves the iterates
/// unchanged.
inline OcStep oc_update(const FinProblem& p, const ThicknessProfile& profile,
                        const SensitivityField& grad, const OptimizerOptions& opts) {
  const std::size_t n = profile.mesh().cells();
  const double dx = profile.mesh().spacing();
  const double floor = thickness_floor(p, profile.mesh().length());
  const double eta = opts.oc_damping;

  std::vector<double> density(n);
  double d_max = 0.0;
  for (std::size_t f = 0; f < n; ++f) {
    density[f] = std::max(0.0, -grad.density(f));
    d_max = std::max(d_max, density[f]);
  }
  if (!(d_max > 0.0 && std::isfinite(d_max))) throw OptimizerError("sensitivities vanish; nothing to optimise");

  // t_f (D_f / (mu D_max))^eta = base_f * mu^-eta
  std::vector<double> base(n), lower(n), upper(n);
  double ratio_min = 1.0;
  for (std::size_t f = 0; f < n; ++f) {
    const double r = density[f] / d_max;
    if (r > 0.0) ratio_min = std::min(ratio_min, r);
    base[f] = profile[f] * std::pow(r, eta);
    lower[f] = std::max(floor, profile[f] * (1.0 - opts.move_limit));
    upper[f] = std::max(floor, profile[f] * (1.0 + opts.move_limit));
  }

  std::vector<double> trial(n);
  auto area_at = [&](double mu) {
    const double scale = std::pow(mu, -eta);
    double sum = 0.0;
    for (std::size_t f = 0; f < n; ++f) {
      trial[f] = std::clamp(base[f] * scale, lower[f], upper[f]);
      sum += trial[f];
    }
    return sum * dx;
  };

  const double target = p.area;
  double lo = ratio_min, hi = 1.0;
  for (int expand = 0; area_at(lo) < target; ++expand) {
    if (expand > 200) throw OptimizerError("cannot bracket the area multiplier from below");
    lo *= 0.5;
  }
  for (int expand = 0; area_at(hi) > target; ++expand) {
    if (expand > 200) throw OptimizerError("cannot bracket the area multiplier from above");
    hi *= 2.0;
  }
  // area_at is nonincreasing in mu; bisect until the bracket collapses.
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (area_at(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  const double area = area_at(mid);

  OcStep step;
  step.area_error = std::abs(area - target) / target;
  if (step.area_error > opts.lambda_bisect_tol) {
    std::ostringstream msg;
    msg << "area bisection stalled at relative error " << step.area_error;
    throw OptimizerError(msg.str());
  }
  step.lambda = mid * d_max;
  for (std::size_t f = 0; f < n; ++f)
    step.max_change = std::max(step.max_change, std::abs(trial[f] - profile[f]) / profile[f]);
  step.thickness = std::move(trial);
  return step;
}

}  // namespace detail

/// Minimises the compliance over face thicknesses at a fixed length.
inline OptimizationReport optimize_profile(const FinProblem& p, double length,
                                           const OptimizerOptions& opts = {}) {
  p.validate();
  opts.validate();
  if (!(p.q0 > 0.0)) throw DomainError("optimisation needs q0 > 0");
  const Mesh mesh(opts.n_cells, length);

  std::vector<double> start;
  if (opts.initial_thickness) {
    if (opts.initial_thickness->size() != mesh.cells())
      throw DomainError("initial thickness needs one value per face");
    start = *opts.initial_thickness;
  } else {
    start.assign(mesh.cells(), p.area / length);
  }
  ThicknessProfile profile = apply_floor(p, ThicknessProfile(mesh, std::move(start)));
  TemperatureField theta = solve_temperature(p, profile);

  std::vector<IterationRecord> history;
  // History compliances come from the extended-precision solve so that
  // late iterations compare true changes rather than round-off.
  auto recorded = [&](const ThicknessProfile& t) { return static_cast<double>(extended_compliance(p, t)); };
  history.push_back({recorded(profile), std::abs(profile.area() - p.area) / p.area, 0.0});

  constexpr double kDescentSlack = 1e-12;
  int rising = 0;
  double lambda = 0.0;
  bool converged = false;
  std::size_t it = 0;
  while (it < opts.max_inner_iters) {
    ++it;
    const AdjointField w = solve_adjoint(p, profile);
    const SensitivityField grad = compliance_gradient(p, profile, theta, w);
    detail::OcStep step = detail::oc_update(p, profile, grad, opts);

    ThicknessProfile next(mesh, std::move(step.thickness));
    TemperatureField next_theta = solve_temperature(p, next);
    const double c_prev = history.back().compliance;
    const double c_next = recorded(next);
    history.push_back({c_next, step.area_error, step.max_change});

    if (c_next > c_prev * (1.0 + kDescentSlack)) {
      if (++rising > 3) {
        std::ostringstream msg;
        msg << "compliance rose for " << rising << " consecutive iterations (iteration " << it
            << ", compliance " << c_next << ")";
        throw OptimizerError(msg.str());
      }
    } else {
      rising = 0;
    }

    profile = std::move(next);
    theta = std::move(next_theta);
    lambda = step.lambda;
    if (step.max_change <= opts.converge_tol) {
      converged = true;
      break;
    }
  }

  OptimizationReport report{.profile = profile,
                            .temperature = theta,
                            .length = length,
                            .compliance = history.back().compliance,
                            .lagrange_multiplier = lambda,
                            .inner_iterations = it,
                            .converged = converged,
                            .history = std::move(history),
                            .optimality = {},
                            .length_evaluations = 0};
  report.optimality = verify_optimality(p, report.profile, report.temperature);
  return report;
}

/// Golden-section search on L over the inner optimum. The returned report
/// is the best inner optimisation evaluated.
inline OptimizationReport optimize_length(const FinProblem& p, const OptimizerOptions& opts = {}) {
  p.validate();
  opts.validate();
  const double reference = optimal_length(p);  // bracketing scale only
  const auto [lo, hi] = opts.length_bracket.value_or(std::pair{0.3 * reference, 3.0 * reference});
  const double tol = opts.length_tol.value_or(1e-4 * reference);

  std::map<double, OptimizationReport> evaluated;
  auto inner = [&](double L) -> const OptimizationReport& {
    auto it = evaluated.find(L);
    if (it == evaluated.end()) it = evaluated.emplace(L, optimize_profile(p, L, opts)).first;
    return it->second;
  };
  const ScalarMinimum<double> best =
      golden_section_minimize([&](double L) { return inner(L).compliance; }, lo, hi, tol);

  // A final bracket that still touches an end of the search interval means
  // the minimum was not enclosed.
  const double edge = 1e-9 * (hi - lo);
  if (best.lower <= lo + edge || best.upper >= hi - edge) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "no interior compliance minimum in [" << lo << ", " << hi << "]: C(lo) = "
        << inner(lo).compliance << ", C(hi) = " << inner(hi).compliance;
    throw OptimizerError(msg.str());
  }

  OptimizationReport report = evaluated.at(best.x);
  report.length_evaluations = evaluated.size();
  return report;
}

}  // namespace finopt
