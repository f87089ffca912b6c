#include "kspic/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kspic/error.hpp"

namespace kspic {

GridSpec GridSpec::from_lengths(double lx, double ly, double dx) {
  if (!(dx > 0.0) || !(lx > 0.0) || !(ly > 0.0)) {
    throw NumericalError("grid: lengths and dx must be positive");
  }
  const double cx = lx / dx;
  const double cy = ly / dx;
  const double rx = std::round(cx);
  const double ry = std::round(cy);
  if (std::abs(cx - rx) > 1e-9 * cx || std::abs(cy - ry) > 1e-9 * cy) {
    throw NumericalError("grid: domain lengths must be integer multiples of dx");
  }
  GridSpec spec{static_cast<int>(rx) + 1, static_cast<int>(ry) + 1, dx};
  spec.validate();
  return spec;
}

void GridSpec::validate() const {
  if (nx < 3 || ny < 3) throw NumericalError("grid: need at least 3 nodes per axis");
  if (!(dx > 0.0) || !std::isfinite(dx)) throw NumericalError("grid: dx must be positive and finite");
}

GridField::GridField(GridSpec spec, double fill) : spec_(spec), values_(spec.size(), fill) {
  spec_.validate();
}

GridField::GridField(GridSpec spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.size()) throw NumericalError("grid field: value count does not match spec");
}

double GridField::integral() const {
  double sum = 0.0;
  for (int j = 0; j < spec_.ny; ++j) {
    for (int i = 0; i < spec_.nx; ++i) sum += spec_.weight(i, j) * (*this)(i, j);
  }
  return sum * spec_.dx * spec_.dx;
}

double GridField::l2_norm() const {
  double sum = 0.0;
  for (int j = 0; j < spec_.ny; ++j) {
    for (int i = 0; i < spec_.nx; ++i) {
      const double v = (*this)(i, j);
      sum += spec_.weight(i, j) * v * v;
    }
  }
  return std::sqrt(sum) * spec_.dx;
}

double GridField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridField::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool GridField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

BilinearStencil bilinear_stencil(const GridSpec& spec, const Vec2& p) {
  if (!is_finite(p) || !spec.contains(p)) {
    throw NumericalError("bilinear: point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                         ") outside the grid domain");
  }
  const double sx = p.x / spec.dx;
  const double sy = p.y / spec.dx;
  const int i = std::min(static_cast<int>(sx), spec.nx - 2);
  const int j = std::min(static_cast<int>(sy), spec.ny - 2);
  const double fx = std::clamp(sx - i, 0.0, 1.0);
  const double fy = std::clamp(sy - j, 0.0, 1.0);
  BilinearStencil s;
  s.i = i;
  s.j = j;
  s.w = {(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy, fx * fy};
  return s;
}

namespace {

double apply_stencil(const GridField& f, const BilinearStencil& s) {
  return s.w[0] * f(s.i, s.j) + s.w[1] * f(s.i + 1, s.j) + s.w[2] * f(s.i, s.j + 1) +
         s.w[3] * f(s.i + 1, s.j + 1);
}

}  // namespace

double sample_bilinear(const GridField& f, const Vec2& p) {
  return apply_stencil(f, bilinear_stencil(f.spec(), p));
}

Vec2 sample_bilinear(const GridField& fx, const GridField& fy, const Vec2& p) {
  if (!(fx.spec() == fy.spec())) throw NumericalError("bilinear: component fields differ in spec");
  const auto s = bilinear_stencil(fx.spec(), p);
  return {apply_stencil(fx, s), apply_stencil(fy, s)};
}

std::pair<GridField, GridField> build_gradient(const GridField& c) {
  if (!c.all_finite()) throw NumericalError("gradient: non-finite concentration");
  const auto& spec = c.spec();
  GridField cx(spec);
  GridField cy(spec);
  const double inv = 1.0 / (2.0 * spec.dx);
  // Mirrored ghosts: C(-1) = C(1), C(n) = C(n-2), hence a zero difference on the boundary.
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) {
      const bool x_edge = i == 0 || i == spec.nx - 1;
      const bool y_edge = j == 0 || j == spec.ny - 1;
      cx(i, j) = x_edge ? 0.0 : (c(i + 1, j) - c(i - 1, j)) * inv;
      cy(i, j) = y_edge ? 0.0 : (c(i, j + 1) - c(i, j - 1)) * inv;
    }
  }
  return {std::move(cx), std::move(cy)};
}

}  // namespace kspic
