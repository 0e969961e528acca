#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "finopt/errors.hpp"
#include "finopt/mesh.hpp"
#include "finopt/problem.hpp"
#include "finopt/solver.hpp"
#include "finopt/tridiagonal.hpp"

namespace finopt {

/// Adjoint operator: transpose of the Jacobian of the discrete residual
/// with respect to theta, built element by element from the face and node
/// contributions rather than by reusing the primal matrix.
inline ChainMatrix assemble_adjoint_system(const FinProblem& p, const ThicknessProfile& profile) {
  const Mesh& mesh = profile.mesh();
  const double dx = mesh.spacing();
  std::vector<double> coupling(mesh.cells(), 0.0);
  std::vector<double> shunt(mesh.nodes(), 0.0);
  for (std::size_t e = 0; e < mesh.cells(); ++e) {
    // Face element dR/dtheta = (k t / dx) [[1, -1], [-1, 1]]. Transposed,
    // its (e, e+1) entry is the former (e+1, e) entry.
    const double lower_entry = -p.k * profile[e] / dx;
    coupling[e] += -lower_entry;
  }
  for (std::size_t i = 0; i < mesh.nodes(); ++i) shunt[i] += 2.0 * p.h * mesh.node_weight(i);
  return ChainMatrix(std::move(coupling), std::move(shunt));
}

/// Solves K^T w = dC/dtheta with C = q0 theta_0, so the load is q0 at the
/// root node. For this objective the adjoint equals the temperature field.
inline AdjointField solve_adjoint(const FinProblem& p, const ThicknessProfile& profile) {
  p.validate();
  detail::require_above_floor(p, profile);
  const Mesh& mesh = profile.mesh();
  std::vector<double> objective_gradient(mesh.nodes(), 0.0);
  objective_gradient[0] = p.q0;
  return AdjointField(mesh, assemble_adjoint_system(p, profile).solve(objective_gradient));
}

/// Compliance gradient with respect to each face thickness.
struct SensitivityField {
  Mesh mesh;
  std::vector<double> values;   ///< dC/dt_f [W K / m per m]
  double lagrange_shift = 0.0;  ///< lambda used when checking stationarity

  /// Gradient per unit length of the face, -k (dtheta/dx)(dw/dx).
  double density(std::size_t face) const { return values[face] / mesh.spacing(); }

  /// density + lambda; vanishes on faces where the area-constrained
  /// Lagrangian is stationary.
  double stationarity_residual(std::size_t face) const { return density(face) + lagrange_shift; }
};

inline SensitivityField compliance_gradient(const FinProblem& p, const ThicknessProfile& profile,
                                            const TemperatureField& primal,
                                            const AdjointField& adjoint,
                                            double lagrange_shift = 0.0) {
  const Mesh& mesh = profile.mesh();
  if (!(primal.mesh() == mesh) || !(adjoint.mesh() == mesh))
    throw DomainError("primal, adjoint and profile must share one mesh");
  SensitivityField s{mesh, std::vector<double>(mesh.cells()), lagrange_shift};
  const double dx = mesh.spacing();
  // dC/dt_f = -w^T (dK/dt_f) theta, and dK/dt_f only touches nodes f, f+1.
  for (std::size_t f = 0; f < mesh.cells(); ++f)
    s.values[f] = -p.k * primal.gradient(f) * adjoint.gradient(f) * dx;
  return s;
}

/// Central difference (C(t + step e_i) - C(t - step e_i)) / (2 step).
///
/// The two perturbed compliances are computed in extended precision: with
/// steps of 1e-6 t0 the compliance change is far below double round-off on
/// faces that carry little heat.
inline double finite_difference_gradient(const FinProblem& p, const ThicknessProfile& profile,
                                         std::size_t face, double step) {
  p.validate();
  detail::require_above_floor(p, profile);
  if (!(step > 0.0 && std::isfinite(step))) throw DomainError("finite-difference step must be positive");
  if (face >= profile.mesh().cells()) throw DomainError("face index out of range");
  const double floor = thickness_floor(p, profile.mesh().length());
  if (profile[face] - step < floor)
    throw DomainError("perturbation pushes face " + std::to_string(face) + " below the thickness floor");

  using Wide = long double;
  auto evaluate = [&](Wide delta) { return extended_compliance(p, profile, face, delta); };
  const Wide h = static_cast<Wide>(step);
  return static_cast<double>((evaluate(h) - evaluate(-h)) / (2.0L * h));
}

}  // namespace finopt
