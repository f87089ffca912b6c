#include "kspic/banded_cholesky.hpp"

#include <lapacke.h>

#include <string>

#include "kspic/error.hpp"

namespace kspic {

BandedCholesky::BandedCholesky(int n, int bandwidth)
    : n_(n), kd_(bandwidth), band_(static_cast<std::size_t>(n) * static_cast<std::size_t>(bandwidth + 1), 0.0) {
  if (n <= 0 || bandwidth < 0 || bandwidth >= n) throw NumericalError("banded cholesky: bad dimensions");
}

// Column-major lower band: A(r, c) lives at band[(r - c) + c * (kd + 1)].
void BandedCholesky::add(int row, int col, double v) {
  if (factorized_) throw NumericalError("banded cholesky: matrix already factorized");
  if (row < col || row - col > kd_ || row >= n_ || col < 0) {
    throw NumericalError("banded cholesky: entry outside the lower band");
  }
  band_[static_cast<std::size_t>(row - col) + static_cast<std::size_t>(col) * (kd_ + 1)] += v;
}

double BandedCholesky::get(int row, int col) const {
  if (row < col) std::swap(row, col);
  if (row - col > kd_) return 0.0;
  return band_[static_cast<std::size_t>(row - col) + static_cast<std::size_t>(col) * (kd_ + 1)];
}

void BandedCholesky::factorize() {
  const lapack_int info = LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'L', n_, kd_, band_.data(), kd_ + 1);
  if (info != 0) {
    throw NumericalError("banded cholesky: factorization failed (info=" + std::to_string(info) +
                         "), matrix not positive definite");
  }
  factorized_ = true;
}

void BandedCholesky::solve(std::span<double> rhs) const {
  if (!factorized_) throw NumericalError("banded cholesky: solve before factorize");
  if (static_cast<int>(rhs.size()) != n_) throw NumericalError("banded cholesky: rhs size mismatch");
  const lapack_int info =
      LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'L', n_, kd_, 1, band_.data(), kd_ + 1, rhs.data(), n_);
  if (info != 0) throw NumericalError("banded cholesky: triangular solve failed");
}

}  // namespace kspic
