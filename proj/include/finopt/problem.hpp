#pragma once

#include <cmath>
#include <string>

#include "finopt/errors.hpp"

namespace finopt {

/// Physical data of a single straight fin, SI units throughout.
///
/// All computation is done in the temperature difference theta = T - T_inf;
/// `t_inf` only shifts reported absolute temperatures. Per-unit-width
/// quantities (q0, compliance, resistance) become totals when multiplied by
/// `width`.
struct FinProblem {
  double k = 0.0;       ///< thermal conductivity [W/(m K)]
  double h = 0.0;       ///< convection coefficient [W/(m^2 K)]
  double area = 0.0;    ///< profile area budget A [m^2]
  double q0 = 0.0;      ///< root thermal power per unit width [W/m]
  double t_inf = 0.0;   ///< ambient temperature [K], reporting only
  double width = 1.0;   ///< fin width b [m]

  /// Total root power Q0 = q0 * b.
  double total_power() const noexcept { return q0 * width; }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(std::isfinite(v) && v > 0.0))
        throw DomainError(std::string(name) + " must be positive and finite");
    };
    positive(k, "conductivity k");
    positive(h, "convection coefficient h");
    positive(area, "area A");
    positive(width, "width b");
    if (!(std::isfinite(q0) && q0 >= 0.0))
      throw DomainError("q0 must be nonnegative and finite");
    if (!std::isfinite(t_inf)) throw DomainError("t_inf must be finite");
  }
};

}  // namespace finopt
