#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

namespace finopt {

template <class Real>
struct ScalarMinimum {
  Real x{};
  Real fx{};
  Real lower{};  ///< final bracket
  Real upper{};
  std::size_t evaluations = 0;
};

/// Golden-section search for a minimiser of a unimodal `f` on [a, b].
/// Stops once the bracket is narrower than `tol` or after `max_iter`
/// reductions. Returns the best point evaluated.
template <class Real, class F>
ScalarMinimum<Real> golden_section_minimize(F&& f, Real a, Real b, Real tol,
                                            std::size_t max_iter = 200) {
  const Real inv_phi = (std::sqrt(Real(5)) - Real(1)) / Real(2);
  if (b < a) std::swap(a, b);

  ScalarMinimum<Real> best;
  auto consider = [&](Real x, Real fx) {
    if (best.evaluations == 0 || fx < best.fx) {
      best.x = x;
      best.fx = fx;
    }
    ++best.evaluations;
  };

  Real u = b - inv_phi * (b - a);
  Real v = a + inv_phi * (b - a);
  Real fu = f(u);
  consider(u, fu);
  Real fv = f(v);
  consider(v, fv);

  for (std::size_t it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (fu <= fv) {
      b = v;
      v = u;
      fv = fu;
      u = b - inv_phi * (b - a);
      fu = f(u);
      consider(u, fu);
    } else {
      a = u;
      u = v;
      fu = fv;
      v = a + inv_phi * (b - a);
      fv = f(v);
      consider(v, fv);
    }
  }
  best.lower = a;
  best.upper = b;
  return best;
}

}  // namespace finopt
