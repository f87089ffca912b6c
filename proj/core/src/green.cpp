#include "kspic/green.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kspic/error.hpp"

namespace kspic {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;
constexpr double kSeriesLimit = 2.0;
constexpr double kAsymptoticLimit = 30.0;

void check_argument(double x) {
  if (!(x > 0.0) || std::isnan(x)) throw NumericalError("bessel K: argument must be positive");
}

// K0(x) = -(ln(x/2) + gamma) I0(x) + sum_k H_k (x^2/4)^k / (k!)^2
// K1(x) = 1/x + ln(x/2) I1(x) - (x/4) sum_k (psi(k+1) + psi(k+2)) (x^2/4)^k / (k! (k+1)!)
struct KPair {
  double k0;
  double k1;
};

KPair series(double x) {
  const double q = 0.25 * x * x;
  const double log_half = std::log(0.5 * x);
  double term0 = 1.0;          // (x^2/4)^k / (k!)^2
  double term1 = 1.0;          // (x^2/4)^k / (k! (k+1)!)
  double harmonic = 0.0;       // H_k
  double i0 = 0.0;
  double i1 = 0.0;
  double sum0 = 0.0;
  double sum1 = 0.0;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      term0 *= q / (static_cast<double>(k) * k);
      term1 *= q / (static_cast<double>(k) * (k + 1));
      harmonic += 1.0 / k;
    }
    const double psi1 = -kEulerGamma + harmonic;
    const double psi2 = psi1 + 1.0 / (k + 1);
    i0 += term0;
    i1 += term1;
    sum0 += harmonic * term0;
    sum1 += (psi1 + psi2) * term1;
    if (term0 < 1e-18 * i0 && k > 2) break;
  }
  i1 *= 0.5 * x;
  return {-(log_half + kEulerGamma) * i0 + sum0, 1.0 / x + log_half * i1 - 0.25 * x * sum1};
}

// Steed's method for the second continued fraction (Temme's normalisation), order 0.
KPair continued_fraction(double x) {
  constexpr double a1 = 0.25;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i < 100000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-17) break;
  }
  h *= a1;
  const double k0 = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
  const double k1 = k0 * (x + 0.5 - h) / x;
  return {k0, k1};
}

// K_nu(x) ~ sqrt(pi/2x) e^{-x} sum_k prod_{j<=k} (4 nu^2 - (2j-1)^2) / (k! (8x)^k)
double asymptotic(double x, double nu) {
  const double mu4 = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double next = term * (mu4 - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::sqrt(kPi / (2.0 * x)) * std::exp(-x) * sum;
}

KPair bessel_pair(double x) {
  check_argument(x);
  if (x <= kSeriesLimit) return series(x);
  if (x <= kAsymptoticLimit) return continued_fraction(x);
  return {asymptotic(x, 0.0), asymptotic(x, 1.0)};
}

}  // namespace

double bessel_k0(double x) { return bessel_pair(x).k0; }
double bessel_k1(double x) { return bessel_pair(x).k1; }

const char* to_string(KernelForm form) {
  switch (form) {
    case KernelForm::yukawa1d: return "yukawa1d";
    case KernelForm::bessel2d: return "bessel2d";
    case KernelForm::log2d: return "log2d";
    case KernelForm::yukawa3d: return "yukawa3d";
  }
  return "unknown";
}

Kernel::Kernel(KernelForm form, double k) : form_(form), k_(k) {
  if (!std::isfinite(k) || k < 0.0) throw NumericalError("kernel: k must be finite and >= 0");
  if (k == 0.0 && (form == KernelForm::yukawa1d || form == KernelForm::bessel2d)) {
    throw NumericalError(std::string("kernel: ") + to_string(form) + " requires k > 0");
  }
}

int Kernel::dimension() const {
  switch (form_) {
    case KernelForm::yukawa1d: return 1;
    case KernelForm::yukawa3d: return 3;
    default: return 2;
  }
}

double Kernel::value(double r) const {
  if (!(r > 0.0)) throw NumericalError("kernel: distance must be positive");
  switch (form_) {
    case KernelForm::yukawa1d: return -std::exp(-k_ * r) / (2.0 * k_);
    case KernelForm::bessel2d: return -bessel_k0(k_ * r) / (2.0 * kPi);
    case KernelForm::log2d: return std::log(r) / (2.0 * kPi);
    case KernelForm::yukawa3d: return -std::exp(-k_ * r) / (4.0 * kPi * r);
  }
  return 0.0;
}

double Kernel::radial_derivative(double r) const {
  if (!(r > 0.0)) throw NumericalError("kernel: distance must be positive");
  switch (form_) {
    case KernelForm::yukawa1d: return 0.5 * std::exp(-k_ * r);
    case KernelForm::bessel2d: return k_ * bessel_k1(k_ * r) / (2.0 * kPi);
    case KernelForm::log2d: return 1.0 / (2.0 * kPi * r);
    case KernelForm::yukawa3d: return std::exp(-k_ * r) * (k_ * r + 1.0) / (4.0 * kPi * r * r);
  }
  return 0.0;
}

Vec2 Kernel::gradient(const Vec2& x, const Vec2& y) const {
  const Vec2 d = x - y;
  const double r = norm(d);
  if (!(r > 0.0)) throw NumericalError("kernel gradient: coincident points");
  return (radial_derivative(r) / r) * d;
}

Vec2 Kernel::gradient_regularized(const Vec2& x, const Vec2& y, double eps) const {
  const Vec2 d = x - y;
  const double r = norm(d);
  if (r > 0.0 && r >= eps) return (radial_derivative(r) / r) * d;
  if (!(eps > 0.0)) throw NumericalError("kernel gradient: coincident points with zero regularization");
  if (r == 0.0) return {};
  return (radial_derivative(eps) / r) * d;
}

}  // namespace kspic
