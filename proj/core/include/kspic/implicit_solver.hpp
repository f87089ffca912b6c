#pragma once

#include "kspic/banded_cholesky.hpp"
#include "kspic/grid.hpp"

namespace kspic {

/// Implicit finite-difference update of  alpha dc/dt = Lap c - k^2 c + P  on a GridSpec with
/// homogeneous Neumann conditions (mirrored ghost nodes).
///
/// Each row of the ghost-node system is scaled by its trapezoidal quadrature weight, which
/// makes the operator symmetric; the band is factorized once at construction. Node ordering
/// runs along the shorter axis first so the bandwidth is min(nx, ny).
class ImplicitSolver {
 public:
  /// alpha must be 0 or 1. alpha == 0 requires k > 0 (the Neumann elliptic operator is
  /// singular otherwise). dt is ignored in elliptic mode.
  ImplicitSolver(GridSpec spec, int alpha, double k, double dt);

  const GridSpec& spec() const { return spec_; }
  int alpha() const { return alpha_; }
  double k() const { return k_; }
  double dt() const { return dt_; }
  bool elliptic() const { return alpha_ == 0; }
  int bandwidth() const { return chol_.bandwidth(); }

  /// C_new from (alpha/dt)(C_new - C) = Lap_h C_new - k^2 C_new + P. In elliptic mode C is
  /// ignored and (k^2 - Lap_h) C_new = P is solved.
  GridField step(const GridField& c, const GridField& p) const;

  /// Elliptic solve; only valid when alpha == 0.
  GridField solve_elliptic(const GridField& p) const;

 private:
  int linear_index(int i, int j) const;

  GridSpec spec_;
  int alpha_;
  double k_;
  double dt_;
  bool x_fastest_;
  BandedCholesky chol_;
};

}  // namespace kspic
