#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "finopt/errors.hpp"

namespace finopt {

/// Uniform mesh on [0, L]: nodes x_i = i dx (i = 0..n), faces at the
/// cell midpoints (i + 1/2) dx (i = 0..n-1). Temperature lives on nodes,
/// thickness on faces.
class Mesh {
 public:
  static constexpr std::size_t min_cells = 4;

  Mesh(std::size_t n_cells, double length) : n_(n_cells), length_(length) {
    check();
    dx_ = length_ / static_cast<double>(n_);
  }

  /// Mesh whose spacing is exactly `dx`; used when rebuilding a mesh from
  /// sampled positions so that re-sampling reproduces them bit for bit.
  static Mesh from_spacing(std::size_t n_cells, double dx) {
    Mesh m(n_cells, dx * static_cast<double>(n_cells));
    m.dx_ = dx;
    return m;
  }

  std::size_t cells() const noexcept { return n_; }
  std::size_t nodes() const noexcept { return n_ + 1; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return dx_; }

  double node(std::size_t i) const noexcept {
    return i == n_ ? length_ : static_cast<double>(i) * dx_;
  }
  double face(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * dx_; }

  /// Lumped control-volume width of node i (half cells at both ends).
  double node_weight(std::size_t i) const noexcept {
    return (i == 0 || i == n_) ? 0.5 * dx_ : dx_;
  }

  friend bool operator==(const Mesh& a, const Mesh& b) noexcept {
    return a.n_ == b.n_ && a.length_ == b.length_ && a.dx_ == b.dx_;
  }

 private:
  void check() const {
    if (n_ < min_cells) throw DomainError("mesh needs at least 4 cells");
    if (!(std::isfinite(length_) && length_ > 0.0)) throw DomainError("mesh length must be positive");
  }

  std::size_t n_;
  double length_;
  double dx_ = 0.0;
};

/// Piecewise-constant thickness t(x), one value per face [m].
class ThicknessProfile {
 public:
  ThicknessProfile(Mesh mesh, std::vector<double> values)
      : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (values_.size() != mesh_.cells())
      throw DomainError("thickness profile needs one value per face");
    for (double v : values_)
      if (!std::isfinite(v) || v < 0.0) throw DomainError("thickness must be finite and nonnegative");
  }

  const Mesh& mesh() const noexcept { return mesh_; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& mutable_values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double root_value() const noexcept { return values_.front(); }

  /// Exact integral of the piecewise-constant profile, sum t_f dx.
  double area() const noexcept {
    return std::accumulate(values_.begin(), values_.end(), 0.0) * mesh_.spacing();
  }

  double min_value() const noexcept {
    double m = values_.front();
    for (double v : values_) m = v < m ? v : m;
    return m;
  }

 private:
  Mesh mesh_;
  std::vector<double> values_;
};

/// Nodal field on a mesh: temperature difference theta or adjoint w.
class NodalField {
 public:
  NodalField(Mesh mesh, std::vector<double> values)
      : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (values_.size() != mesh_.nodes()) throw DomainError("nodal field needs one value per node");
  }

  const Mesh& mesh() const noexcept { return mesh_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double root_value() const noexcept { return values_.front(); }
  double tip_value() const noexcept { return values_.back(); }

  /// Difference quotient across face i.
  double gradient(std::size_t face) const noexcept {
    return (values_[face + 1] - values_[face]) / mesh_.spacing();
  }

 private:
  Mesh mesh_;
  std::vector<double> values_;
};

struct TemperatureField : NodalField {
  using NodalField::NodalField;
};

struct AdjointField : NodalField {
  using NodalField::NodalField;
};

}  // namespace finopt
