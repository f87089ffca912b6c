#pragma once

#include "kspic/vec2.hpp"

namespace kspic {

/// Modified Bessel functions of the second kind, orders 0 and 1, for x > 0.
/// Power series below x = 2, Steed's continued fraction up to x = 30, Hankel asymptotic
/// expansion beyond. Throws NumericalError for x <= 0.
double bessel_k0(double x);
double bessel_k1(double x);

enum class KernelForm { yukawa1d, bessel2d, log2d, yukawa3d };

/// Free-space fundamental solution V of (Lap - k^2), with the planar log kernel for k = 0.
///   yukawa1d: -exp(-k r) / (2k)
///   bessel2d: -K0(k r) / (2 pi)
///   log2d:     ln(r) / (2 pi)
///   yukawa3d: -exp(-k r) / (4 pi r)
class Kernel {
 public:
  Kernel(KernelForm form, double k);
  static Kernel log2d() { return {KernelForm::log2d, 0.0}; }
  static Kernel bessel2d(double k) { return {KernelForm::bessel2d, k}; }

  KernelForm form() const { return form_; }
  double k() const { return k_; }
  int dimension() const;

  /// V(r); throws for r <= 0.
  double value(double r) const;
  /// dV/dr; positive for every form (V increases with r).
  double radial_derivative(double r) const;
  /// grad_x V(x, y) for the planar forms; throws for coincident points.
  Vec2 gradient(const Vec2& x, const Vec2& y) const;
  /// Same, with |x - y| clamped to max(|x - y|, eps) inside dV/dr. Coincident points give a
  /// zero vector when eps > 0.
  Vec2 gradient_regularized(const Vec2& x, const Vec2& y, double eps) const;

 private:
  KernelForm form_;
  double k_;
};

const char* to_string(KernelForm form);

}  // namespace kspic
