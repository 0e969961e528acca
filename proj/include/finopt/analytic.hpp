#pragma once

// Closed-form optimum of the straight fin with prescribed root power:
//
//   L     = cbrt(3 k A / h)
//   t(x)  = (h / k) (L - x)^2
//   th(x) = q0 / (h L) * (1 - x / L)
//   C     = q0^2 / (h L)
//
// and the resistance split that goes with it.

#include <cmath>

#include "finopt/errors.hpp"
#include "finopt/problem.hpp"

namespace finopt {

namespace detail {

inline void require_position(double x, double length) {
  if (!(std::isfinite(length) && length > 0.0)) throw DomainError("length must be positive");
  if (!(x >= 0.0 && x <= length)) throw DomainError("x outside [0, L]");
}

}  // namespace detail

inline double optimal_length(const FinProblem& p) {
  p.validate();
  return std::cbrt(3.0 * p.k * p.area / p.h);
}

inline double optimal_thickness(const FinProblem& p, double x, double length) {
  p.validate();
  detail::require_position(x, length);
  const double gap = length - x;
  return p.h / p.k * gap * gap;
}

inline double optimal_temperature(const FinProblem& p, double x, double length) {
  p.validate();
  detail::require_position(x, length);
  return p.q0 / (p.h * length) * (1.0 - x / length);
}

inline double optimal_compliance(const FinProblem& p, double length) {
  p.validate();
  if (!(std::isfinite(length) && length > 0.0)) throw DomainError("length must be positive");
  return p.q0 * p.q0 / (p.h * length);
}

/// Root power per unit width that gives the optimal fin a unit root
/// temperature difference, i.e. the prescribed-temperature problem.
inline double duffin_equivalent_flux(const FinProblem& p) {
  p.validate();
  return std::cbrt(3.0 * p.h * p.h * p.k * p.area);
}

struct ResistanceBreakdown {
  double compliance = 0.0;  ///< [W K / m]
  double r_fin = 0.0;       ///< total, per unit width [m K / W]
  double r_cond = 0.0;
  double r_conv = 0.0;
  double biot = 0.0;        ///< r_cond / r_conv
};

/// Splits the fin resistance C / q0^2 into its convective part 1 / (2 h L)
/// and the conductive remainder.
inline ResistanceBreakdown resistance_breakdown(const FinProblem& p, double compliance,
                                                double length) {
  p.validate();
  if (!(p.q0 > 0.0)) throw DomainError("resistance is undefined for q0 = 0");
  if (!(std::isfinite(length) && length > 0.0)) throw DomainError("length must be positive");
  if (!std::isfinite(compliance)) throw DomainError("compliance must be finite");
  ResistanceBreakdown r;
  r.compliance = compliance;
  r.r_fin = compliance / (p.q0 * p.q0);
  r.r_conv = 1.0 / (2.0 * p.h * length);
  r.r_cond = r.r_fin - r.r_conv;
  r.biot = r.r_cond / r.r_conv;
  return r;
}

/// Everything the closed form gives for one problem.
struct OptimalSolution {
  FinProblem problem;
  double length = 0.0;
  double root_thickness = 0.0;
  double root_temp_diff = 0.0;
  double compliance = 0.0;

  double thickness(double x) const { return optimal_thickness(problem, x, length); }
  double temperature(double x) const { return optimal_temperature(problem, x, length); }

  /// Uses r_fin = 1 / (h L) directly, which does not depend on the load,
  /// and makes the split exact: Bi == 1.
  ResistanceBreakdown resistance() const {
    ResistanceBreakdown r;
    r.compliance = compliance;
    r.r_fin = 1.0 / (problem.h * length);
    r.r_conv = r.r_fin / 2.0;
    r.r_cond = r.r_fin - r.r_conv;
    r.biot = r.r_cond / r.r_conv;
    return r;
  }
};

inline OptimalSolution optimal_solution(const FinProblem& p) {
  OptimalSolution s;
  s.problem = p;
  s.length = optimal_length(p);
  s.root_thickness = p.h * s.length * s.length / p.k;
  s.root_temp_diff = p.q0 / (p.h * s.length);
  s.compliance = optimal_compliance(p, s.length);
  return s;
}

}  // namespace finopt
