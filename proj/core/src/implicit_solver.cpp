#include "kspic/implicit_solver.hpp"

#include <cmath>
#include <vector>

#include "kspic/error.hpp"

namespace kspic {

ImplicitSolver::ImplicitSolver(GridSpec spec, int alpha, double k, double dt)
    : spec_(spec), alpha_(alpha), k_(k), dt_(dt), x_fastest_(spec.nx <= spec.ny) {
  spec_.validate();
  if (alpha != 0 && alpha != 1) throw NumericalError("implicit solver: alpha must be 0 or 1");
  if (!std::isfinite(k) || k < 0.0) throw NumericalError("implicit solver: k must be finite and >= 0");
  if (alpha == 0 && k == 0.0) {
    throw NumericalError("implicit solver: singular elliptic operator (alpha = 0 requires k > 0)");
  }
  if (alpha == 1 && !(dt > 0.0 && std::isfinite(dt))) {
    throw NumericalError("implicit solver: dt must be positive and finite");
  }

  const int nx = spec_.nx;
  const int ny = spec_.ny;
  const double h2 = spec_.dx * spec_.dx;
  const double diag_shift = h2 * ((alpha_ == 1 ? 1.0 / dt_ : 0.0) + k_ * k_);
  chol_ = BandedCholesky(static_cast<int>(spec_.size()), x_fastest_ ? nx : ny);

  // Row p of the ghost-node system times w_p * dx^2:
  //   w_p [ (dx^2 (alpha/dt + k^2)) C_p - D2x C - D2y C ].
  // A boundary node's inward neighbour appears twice (ghost mirror), giving coefficient 2.
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int p = linear_index(i, j);
      const double w = spec_.weight(i, j);
      double diag = diag_shift;
      auto couple = [&](int ii, int jj, double coef) {
        const int q = linear_index(ii, jj);
        if (q < p) chol_.add(p, q, -w * coef);
      };
      if (i == 0) {
        couple(1, j, 2.0);
      } else if (i == nx - 1) {
        couple(nx - 2, j, 2.0);
      } else {
        couple(i - 1, j, 1.0);
        couple(i + 1, j, 1.0);
      }
      if (j == 0) {
        couple(i, 1, 2.0);
      } else if (j == ny - 1) {
        couple(i, ny - 2, 2.0);
      } else {
        couple(i, j - 1, 1.0);
        couple(i, j + 1, 1.0);
      }
      diag += 4.0;
      chol_.add(p, p, w * diag);
    }
  }
  chol_.factorize();
}

int ImplicitSolver::linear_index(int i, int j) const {
  return x_fastest_ ? j * spec_.nx + i : i * spec_.ny + j;
}

GridField ImplicitSolver::step(const GridField& c, const GridField& p) const {
  if (!(p.spec() == spec_)) throw NumericalError("implicit solver: source spec mismatch");
  if (!p.all_finite()) throw NumericalError("implicit solver: non-finite source");
  const bool parabolic = alpha_ == 1;
  if (parabolic) {
    if (!(c.spec() == spec_)) throw NumericalError("implicit solver: concentration spec mismatch");
    if (!c.all_finite()) throw NumericalError("implicit solver: non-finite concentration");
  }
  const double h2 = spec_.dx * spec_.dx;
  std::vector<double> rhs(spec_.size());
  for (int j = 0; j < spec_.ny; ++j) {
    for (int i = 0; i < spec_.nx; ++i) {
      double b = p(i, j);
      if (parabolic) b += c(i, j) / dt_;
      rhs[static_cast<std::size_t>(linear_index(i, j))] = spec_.weight(i, j) * h2 * b;
    }
  }
  chol_.solve(rhs);
  GridField out(spec_);
  for (int j = 0; j < spec_.ny; ++j) {
    for (int i = 0; i < spec_.nx; ++i) out(i, j) = rhs[static_cast<std::size_t>(linear_index(i, j))];
  }
  if (!out.all_finite()) throw NumericalError("implicit solver: non-finite solution");
  return out;
}

GridField ImplicitSolver::solve_elliptic(const GridField& p) const {
  if (!elliptic()) throw NumericalError("implicit solver: elliptic solve requested in parabolic mode");
  return step(GridField{}, p);
}

}  // namespace kspic
