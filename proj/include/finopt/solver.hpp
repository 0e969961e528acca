#pragma once

// Vertex-centred finite-volume discretisation of
//
//   -k d/dx(t dtheta/dx) + 2 h theta = 0   on (0, L)
//   -k t dtheta/dx = q0 at x = 0,   -k t dtheta/dx = 0 at x = L
//
// Face i (between nodes i and i+1) carries the conductance k t_i / dx;
// node i carries the convective shunt 2 h w_i with w_i its control-volume
// width. Summing all rows telescopes the face fluxes, so the discrete
// energy balance q0 = sum 2 h w_i theta_i holds to round-off.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "finopt/analytic.hpp"
#include "finopt/errors.hpp"
#include "finopt/mesh.hpp"
#include "finopt/problem.hpp"
#include "finopt/tridiagonal.hpp"

namespace finopt {

/// Relative size of the tip regularisation.
inline constexpr double kThicknessFloorFactor = 1e-6;

/// Lower bound on any discrete face thickness: 1e-6 (h/k) L^2, i.e. a
/// millionth of the optimal root thickness for a fin of length L.
inline double thickness_floor(const FinProblem& p, double length) {
  return kThicknessFloorFactor * p.h / p.k * length * length;
}

namespace detail {

// Slack on the floor comparison so profiles that went through a text
// round trip (and a re-derived mesh length) are still accepted.
inline constexpr double kFloorSlack = 1e-9;

inline void require_above_floor(const FinProblem& p, const ThicknessProfile& profile) {
  const double floor = thickness_floor(p, profile.mesh().length());
  const auto vals = profile.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] < floor * (1.0 - kFloorSlack))
      throw SolverError("face " + std::to_string(i) + " thickness " + std::to_string(vals[i]) +
                        " is below the floor " + std::to_string(floor));
  }
}

}  // namespace detail

/// Raises every face to at least the thickness floor.
inline ThicknessProfile apply_floor(const FinProblem& p, ThicknessProfile profile) {
  const double floor = thickness_floor(p, profile.mesh().length());
  for (double& v : profile.mutable_values()) v = std::max(v, floor);
  return profile;
}

inline ThicknessProfile constant_profile(const Mesh& mesh, double thickness) {
  return ThicknessProfile(mesh, std::vector<double>(mesh.cells(), thickness));
}

/// Face values sampled at face midpoints.
inline ThicknessProfile sample_profile(const Mesh& mesh, const std::function<double(double)>& t) {
  std::vector<double> v(mesh.cells());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = t(mesh.face(i));
  return ThicknessProfile(mesh, std::move(v));
}

/// Closed-form optimal profile (h/k)(L - x)^2 as exact cell averages, so the
/// discrete area equals (h/k) L^3 / 3. Floored at the tip.
inline ThicknessProfile analytic_profile(const FinProblem& p, const Mesh& mesh) {
  p.validate();
  const double L = mesh.length();
  const double dx = mesh.spacing();
  const double scale = p.h / p.k;
  std::vector<double> v(mesh.cells());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double gap = L - mesh.face(i);
    v[i] = scale * (gap * gap + dx * dx / 12.0);
  }
  return apply_floor(p, ThicknessProfile(mesh, std::move(v)));
}

/// Assembled system matrix; exposed so its symmetry can be checked directly.
inline ChainMatrix assemble_system(const FinProblem& p, const ThicknessProfile& profile) {
  const Mesh& mesh = profile.mesh();
  const double dx = mesh.spacing();
  std::vector<double> coupling(mesh.cells());
  for (std::size_t i = 0; i < coupling.size(); ++i) coupling[i] = p.k * profile[i] / dx;
  std::vector<double> shunt(mesh.nodes());
  for (std::size_t i = 0; i < shunt.size(); ++i) shunt[i] = 2.0 * p.h * mesh.node_weight(i);
  return ChainMatrix(std::move(coupling), std::move(shunt));
}

/// Root flux q0 enters node 0; every other node is unloaded.
inline std::vector<double> load_vector(const FinProblem& p, const Mesh& mesh) {
  std::vector<double> f(mesh.nodes(), 0.0);
  f[0] = p.q0;
  return f;
}

inline TemperatureField solve_temperature(const FinProblem& p, const ThicknessProfile& profile) {
  p.validate();
  detail::require_above_floor(p, profile);
  const ChainMatrix system = assemble_system(p, profile);
  return TemperatureField(profile.mesh(), system.solve(load_vector(p, profile.mesh())));
}

/// Thermal compliance per unit width, theta_0 q0.
inline double compliance(const FinProblem& p, const TemperatureField& field) {
  return field.root_value() * p.q0;
}

/// Compliance evaluated in extended precision, optionally with face `face`
/// offset by `delta`. Differences of compliances near an optimum are far
/// below double round-off; this keeps them resolvable.
inline long double extended_compliance(const FinProblem& p, const ThicknessProfile& profile,
                                       std::size_t face = static_cast<std::size_t>(-1),
                                       long double delta = 0.0L) {
  using Wide = long double;
  const Mesh& mesh = profile.mesh();
  const Wide dx = static_cast<Wide>(mesh.spacing());
  std::vector<Wide> coupling(mesh.cells()), shunt(mesh.nodes()), load(mesh.nodes(), 0.0L);
  for (std::size_t f = 0; f < coupling.size(); ++f) {
    const Wide t = static_cast<Wide>(profile[f]) + (f == face ? delta : 0.0L);
    coupling[f] = static_cast<Wide>(p.k) * t / dx;
  }
  for (std::size_t i = 0; i < shunt.size(); ++i)
    shunt[i] = 2.0L * static_cast<Wide>(p.h) * static_cast<Wide>(mesh.node_weight(i));
  load[0] = static_cast<Wide>(p.q0);
  return BasicChainMatrix<Wide>(std::move(coupling), std::move(shunt)).solve(load)[0] * static_cast<Wide>(p.q0);
}

/// |q0 - sum 2 h w_i theta_i| / q0: the fraction of the root power not
/// accounted for by convection. Returns 0 for an unloaded, zero field.
inline double energy_balance_residual(const FinProblem& p, const TemperatureField& field,
                                      const ThicknessProfile& profile) {
  const Mesh& mesh = profile.mesh();
  if (!(field.mesh() == mesh)) throw DomainError("field and profile live on different meshes");
  double convected = 0.0;
  for (std::size_t i = 0; i < mesh.nodes(); ++i)
    convected += 2.0 * p.h * field[i] * mesh.node_weight(i);
  const double denom = std::max(p.q0, std::numeric_limits<double>::min());
  return std::abs(p.q0 - convected) / denom;
}

/// Observed order of convergence of a scalar output on meshes n, 2n, 4n.
struct ConvergenceStudy {
  std::vector<std::size_t> cells;
  std::vector<double> values;
  std::vector<double> errors;  ///< vs reference, or successive differences
  double order = 0.0;          ///< smaller of the two pairwise orders
  double finest_order = 0.0;   ///< order from the two finest meshes
  bool conclusive = false;
  std::string note;
};

/// Runs the solver on three successively halved meshes and estimates the
/// convergence order of `extract(theta)`. With a reference value the errors
/// are |f_n - ref|; without one the Richardson differences f_n - f_2n are
/// used. Non-monotone or vanishing errors make the study inconclusive.
inline ConvergenceStudy refine_and_estimate_order(
    const FinProblem& p, double length, std::size_t base_cells,
    const std::function<ThicknessProfile(const Mesh&)>& profile_generator,
    const std::function<double(const TemperatureField&)>& extract,
    std::optional<double> reference = std::nullopt) {
  ConvergenceStudy study;
  for (std::size_t n = base_cells, level = 0; level < 3; ++level, n *= 2) {
    const Mesh mesh(n, length);
    const ThicknessProfile profile = profile_generator(mesh);
    study.cells.push_back(n);
    study.values.push_back(extract(solve_temperature(p, profile)));
  }

  const auto& f = study.values;
  if (reference) {
    for (double v : f) study.errors.push_back(std::abs(v - *reference));
  } else {
    const double d1 = f[0] - f[1];
    const double d2 = f[1] - f[2];
    if (d1 * d2 < 0.0) {
      study.note = "successive differences change sign";
      return study;
    }
    study.errors = {std::abs(d1), std::abs(d2)};
  }

  const auto& e = study.errors;
  for (double v : e) {
    if (!(v > 0.0)) {
      study.note = "errors vanish; order undefined";
      return study;
    }
  }
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (!(e[i] < e[i - 1])) {
      study.note = "errors do not decrease monotonically";
      return study;
    }
  }

  if (e.size() == 3) {
    const double p1 = std::log2(e[0] / e[1]);
    const double p2 = std::log2(e[1] / e[2]);
    study.order = std::min(p1, p2);
    study.finest_order = p2;
  } else {
    study.order = study.finest_order = std::log2(e[0] / e[1]);
  }
  study.conclusive = true;
  return study;
}

}  // namespace finopt
