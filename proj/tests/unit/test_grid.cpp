#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kspic/error.hpp"
#include "kspic/grid.hpp"

using namespace kspic;

TEST(GridSpec, FromLengths) {
  const auto g = GridSpec::from_lengths(3.2, 3.2, 0.05);
  EXPECT_EQ(g.nx, 65);
  EXPECT_EQ(g.ny, 65);
  EXPECT_DOUBLE_EQ(g.lx(), 3.2);
  EXPECT_EQ(g.node(2, 3).x, 0.1);
  EXPECT_THROW(GridSpec::from_lengths(1.0, 1.0, 0.3), NumericalError);
  EXPECT_THROW((GridSpec{2, 5, 0.1}.validate()), NumericalError);
  EXPECT_THROW((GridSpec{5, 5, 0.0}.validate()), NumericalError);
}

TEST(GridSpec, QuadratureWeights) {
  const GridSpec g{5, 4, 0.25};
  EXPECT_EQ(g.weight(0, 0), 0.25);
  EXPECT_EQ(g.weight(2, 0), 0.5);
  EXPECT_EQ(g.weight(4, 2), 0.5);
  EXPECT_EQ(g.weight(2, 2), 1.0);
  GridField one(g, 1.0);
  EXPECT_NEAR(one.integral(), g.lx() * g.ly(), 1e-14);
}

TEST(Bilinear, NodalExactnessAndCellCenter) {
  const GridSpec g{6, 5, 0.2};
  GridField f(g);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : f.values()) v = u(rng);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) EXPECT_NEAR(sample_bilinear(f, g.node(i, j)), f(i, j), 1e-15);
  }
  const Vec2 center{2.5 * g.dx, 1.5 * g.dx};
  EXPECT_NEAR(sample_bilinear(f, center), 0.25 * (f(2, 1) + f(3, 1) + f(2, 2) + f(3, 2)), 1e-15);
}

TEST(Bilinear, PartitionOfUnity) {
  const GridSpec g{9, 7, 0.125};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.0, g.lx()), uy(0.0, g.ly());
  for (int n = 0; n < 10000; ++n) {
    const auto s = bilinear_stencil(g, {ux(rng), uy(rng)});
    double sum = 0.0;
    for (double w : s.w) {
      EXPECT_GE(w, 0.0);
      sum += w;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  const auto corner = bilinear_stencil(g, {g.lx(), g.ly()});
  EXPECT_NEAR(corner.w[3], 1.0, 1e-12);
}

TEST(Bilinear, LinearRampAndOutside) {
  const GridSpec g{11, 11, 0.1};
  GridField ramp(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) ramp(i, j) = i * g.dx;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 1000; ++n) {
    const Vec2 p{u(rng), u(rng)};
    EXPECT_NEAR(sample_bilinear(ramp, p), p.x, 1e-14);
  }
  EXPECT_THROW(sample_bilinear(ramp, {-0.01, 0.5}), NumericalError);
  EXPECT_THROW(sample_bilinear(ramp, {0.5, 1.01}), NumericalError);
}

TEST(Gradient, ConstantAndLinear) {
  const GridSpec g{8, 6, 0.3};
  const auto [cx0, cy0] = build_gradient(GridField(g, 4.0));
  EXPECT_EQ(cx0.max_abs(), 0.0);
  EXPECT_EQ(cy0.max_abs(), 0.0);

  GridField lin(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) lin(i, j) = 1.7 * i * g.dx;
  const auto [cx, cy] = build_gradient(lin);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 1; i < g.nx - 1; ++i) EXPECT_NEAR(cx(i, j), 1.7, 1e-12);
    EXPECT_EQ(cx(0, j), 0.0);
    EXPECT_EQ(cx(g.nx - 1, j), 0.0);
  }
  EXPECT_EQ(cy.max_abs(), 0.0);
}

TEST(Gradient, SecondOrderOnCosine) {
  const double l = 1.0;
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    const GridSpec g{n + 1, n + 1, l / n};
    GridField c(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) c(i, j) = std::cos(std::numbers::pi * i * g.dx / l);
    const auto [cx, cy] = build_gradient(c);
    double e = 0.0;
    for (int j = 1; j < g.ny - 1; ++j)
      for (int i = 1; i < g.nx - 1; ++i) {
        const double exact = -(std::numbers::pi / l) * std::sin(std::numbers::pi * i * g.dx / l);
        e = std::max(e, std::abs(cx(i, j) - exact));
      }
    err.push_back(e);
  }
  EXPECT_GE(std::log2(err[0] / err[1]), 1.9);
  EXPECT_GE(std::log2(err[1] / err[2]), 1.9);
}
