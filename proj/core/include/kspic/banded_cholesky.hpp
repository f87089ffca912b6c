#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kspic {

/// Cholesky factorization of a symmetric positive definite band matrix, stored as the lower
/// band in LAPACK column layout. Immutable after factorize(); solve() is safe to call
/// concurrently.
class BandedCholesky {
 public:
  BandedCholesky() = default;
  BandedCholesky(int n, int bandwidth);

  int size() const { return n_; }
  int bandwidth() const { return kd_; }

  /// Adds v to A(row, col) for col <= row <= col + bandwidth. Only valid before factorize().
  void add(int row, int col, double v);
  double get(int row, int col) const;

  /// Throws NumericalError if the matrix is not positive definite.
  void factorize();
  bool factorized() const { return factorized_; }

  /// In-place solve A x = b.
  void solve(std::span<double> rhs) const;

 private:
  int n_ = 0;
  int kd_ = 0;
  bool factorized_ = false;
  std::vector<double> band_;
};

}  // namespace kspic
