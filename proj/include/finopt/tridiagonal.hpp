#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "finopt/errors.hpp"

namespace finopt {

/// Symmetric tridiagonal M-matrix of a chain network: node i is linked to
/// node i+1 by a conductance `coupling[i] > 0` and to ground by a shunt
/// `shunt[i] >= 0`.
///
///   diag(i)     = shunt[i] + coupling[i-1] + coupling[i]
///   offdiag(i)  = -coupling[i]          (entry (i, i+1) == entry (i+1, i))
///
/// Keeping couplings and shunts apart lets the solver avoid forming the
/// nearly cancelling diagonal, which matters when conduction dominates
/// convection by many orders of magnitude.
template <class Real>
class BasicChainMatrix {
 public:
  BasicChainMatrix(std::vector<Real> coupling, std::vector<Real> shunt)
      : coupling_(std::move(coupling)), shunt_(std::move(shunt)) {
    if (shunt_.size() != coupling_.size() + 1) throw DomainError("chain needs n couplings and n+1 shunts");
  }

  std::size_t size() const noexcept { return shunt_.size(); }
  std::span<const Real> coupling() const noexcept { return coupling_; }
  std::span<const Real> shunt() const noexcept { return shunt_; }

  Real diagonal(std::size_t i) const noexcept {
    Real d = shunt_[i];
    if (i > 0) d += coupling_[i - 1];
    if (i < coupling_.size()) d += coupling_[i];
    return d;
  }

  /// Entry (i, j) of the assembled matrix.
  Real entry(std::size_t i, std::size_t j) const noexcept {
    if (i == j) return diagonal(i);
    if (j == i + 1) return -coupling_[i];
    if (i == j + 1) return -coupling_[j];
    return 0.0;
  }

  std::vector<Real> apply(std::span<const Real> x) const {
    const std::size_t n = size();
    std::vector<Real> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      Real v = diagonal(i) * x[i];
      if (i > 0) v -= coupling_[i - 1] * x[i - 1];
      if (i + 1 < n) v -= coupling_[i] * x[i + 1];
      y[i] = v;
    }
    return y;
  }

  /// Direct solve by elimination from the last node toward the first.
  ///
  /// Each eliminated tail is folded into an equivalent admittance
  /// G_i = shunt_i + series(coupling_i, G_{i+1}); with a nonnegative right
  /// hand side every step adds nonnegative numbers, so the result is
  /// accurate to a few ulps regardless of the conduction/convection ratio.
  std::vector<Real> solve(std::span<const Real> rhs) const {
    const std::size_t n = size();
    if (rhs.size() != n) throw DomainError("right-hand side size mismatch");
    for (Real c : coupling_)
      if (!(c > 0.0 && std::isfinite(c))) throw SolverError("chain coupling must be positive");
    for (Real s : shunt_)
      if (!(s >= 0.0 && std::isfinite(s))) throw SolverError("chain shunt must be nonnegative");

    std::vector<Real> admittance(n), carried(n);
    admittance[n - 1] = shunt_[n - 1];
    carried[n - 1] = rhs[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
      const Real denom = coupling_[i] + admittance[i + 1];
      admittance[i] = shunt_[i] + coupling_[i] * admittance[i + 1] / denom;
      carried[i] = rhs[i] + coupling_[i] * carried[i + 1] / denom;
    }
    if (!(admittance[0] > 0.0)) throw SolverError("singular chain system (no path to ground)");

    std::vector<Real> x(n);
    x[0] = carried[0] / admittance[0];
    for (std::size_t i = 0; i + 1 < n; ++i)
      x[i + 1] = (coupling_[i] * x[i] + carried[i + 1]) / (coupling_[i] + admittance[i + 1]);

    for (Real v : x)
      if (!std::isfinite(v)) throw SolverError("non-finite solution of chain system");
    return x;
  }

 private:
  std::vector<Real> coupling_;
  std::vector<Real> shunt_;
};

using ChainMatrix = BasicChainMatrix<double>;

}  // namespace finopt
