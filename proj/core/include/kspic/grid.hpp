#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "kspic/vec2.hpp"

namespace kspic {

/// Uniform node-centred grid. Node (i, j) sits at (i*dx, j*dx); boundary nodes are included,
/// so the domain is [0, (nx-1)dx] x [0, (ny-1)dx].
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;

  /// Square or rectangular domain from physical lengths; lengths must be multiples of dx
  /// (to 1e-9 relative).
  static GridSpec from_lengths(double lx, double ly, double dx);

  double lx() const { return (nx - 1) * dx; }
  double ly() const { return (ny - 1) * dx; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  Vec2 node(int i, int j) const { return {i * dx, j * dx}; }
  bool contains(const Vec2& p) const { return p.x >= 0.0 && p.x <= lx() && p.y >= 0.0 && p.y <= ly(); }

  /// Trapezoidal quadrature weight: 1 interior, 1/2 edge, 1/4 corner.
  double weight(int i, int j) const {
    const double wx = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
    const double wy = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
    return wx * wy;
  }

  /// Throws NumericalError unless nx, ny >= 3 and dx > 0.
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Node-sampled scalar field, row-major with x fastest (values[j*nx + i]).
class GridField {
 public:
  GridField() = default;
  explicit GridField(GridSpec spec, double fill = 0.0);
  GridField(GridSpec spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  double& operator()(int i, int j) { return values_[spec_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[spec_.index(i, j)]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  /// Quadrature-weighted integral  sum w_ij F_ij dx^2.
  double integral() const;
  /// Quadrature-weighted L2 norm.
  double l2_norm() const;
  double max_abs() const;
  double max() const;
  bool all_finite() const;

 private:
  GridSpec spec_{};
  std::vector<double> values_;
};

/// Containing cell and bilinear corner weights for a point in the closed domain. Weights are
/// ordered lower-left, lower-right, upper-left, upper-right.
struct BilinearStencil {
  int i = 0;
  int j = 0;
  std::array<double, 4> w{};
};

/// Throws NumericalError when p is outside [0, Lx] x [0, Ly] or non-finite.
BilinearStencil bilinear_stencil(const GridSpec& spec, const Vec2& p);

double sample_bilinear(const GridField& f, const Vec2& p);
Vec2 sample_bilinear(const GridField& fx, const GridField& fy, const Vec2& p);

/// Central-difference gradient (CX, CY). Boundary nodes use the mirrored ghost value, so the
/// normal component vanishes there.
std::pair<GridField, GridField> build_gradient(const GridField& c);

}  // namespace kspic
