#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kspic/banded_cholesky.hpp"
#include "kspic/error.hpp"
#include "kspic/implicit_solver.hpp"

using namespace kspic;

namespace {

// Gaussian elimination with partial pivoting on a dense copy.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

// Unscaled ghost-node system: (alpha/dt + k^2) C - Lap_h C = P + (alpha/dt) C_old with the
// mirrored ghost values substituted into the 5-point Laplacian.
std::vector<double> ghost_oracle(const GridSpec& g, int alpha, double k, double dt, const GridField& c_old,
                                 const GridField& p) {
  const std::size_t n = g.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n);
  const double h2 = g.dx * g.dx;
  const double a_dt = alpha == 1 ? 1.0 / dt : 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const auto row = g.index(i, j);
      a[row][row] += a_dt + k * k + 4.0 / h2;
      const auto nb = [&](int ii, int jj) {
        if (ii < 0) ii = 1;
        if (ii >= g.nx) ii = g.nx - 2;
        if (jj < 0) jj = 1;
        if (jj >= g.ny) jj = g.ny - 2;
        a[row][g.index(ii, jj)] -= 1.0 / h2;
      };
      nb(i - 1, j);
      nb(i + 1, j);
      nb(i, j - 1);
      nb(i, j + 1);
      b[row] = p(i, j) + a_dt * c_old(i, j);
    }
  }
  return dense_solve(a, b);
}

GridField random_field(const GridSpec& g, std::uint64_t seed, double lo, double hi) {
  GridField f(g);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  for (auto& v : f.values()) v = u(rng);
  return f;
}

}  // namespace

TEST(BandedCholesky, MatchesDenseSolve) {
  const int n = 40;
  const int bw = 5;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BandedCholesky chol(n, bw);
  std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
  for (int c = 0; c < n; ++c) {
    for (int r = c; r <= std::min(n - 1, c + bw); ++r) {
      const double v = r == c ? 2.0 * bw + 1.0 + u(rng) : u(rng);
      chol.add(r, c, v);
      dense[r][c] += v;
      if (r != c) dense[c][r] += v;
    }
  }
  EXPECT_EQ(chol.get(3, 1), dense[3][1]);
  chol.factorize();
  std::vector<double> b(n);
  for (auto& v : b) v = u(rng);
  const auto x_ref = dense_solve(dense, b);
  chol.solve(b);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(b[i], x_ref[i], 1e-12);
}

TEST(BandedCholesky, RejectsIndefinite) {
  BandedCholesky chol(3, 1);
  chol.add(0, 0, 1.0);
  chol.add(1, 1, -1.0);
  chol.add(2, 2, 1.0);
  EXPECT_THROW(chol.factorize(), NumericalError);
}

TEST(ImplicitSolver, RejectsSingularElliptic) {
  const GridSpec g{5, 5, 0.1};
  try {
    ImplicitSolver s(g, 0, 0.0, 0.1);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("singular elliptic operator"), std::string::npos);
  }
  EXPECT_THROW(ImplicitSolver(g, 2, 1.0, 0.1), NumericalError);
  EXPECT_THROW(ImplicitSolver(g, 1, 1.0, 0.0), NumericalError);
}

TEST(ImplicitSolver, BandwidthIsShorterAxis) {
  EXPECT_EQ(ImplicitSolver(GridSpec{7, 20, 0.1}, 1, 1.0, 0.1).bandwidth(), 7);
  EXPECT_EQ(ImplicitSolver(GridSpec{20, 7, 0.1}, 1, 1.0, 0.1).bandwidth(), 7);
}

TEST(ImplicitSolver, MatchesDenseGhostNodeOracle) {
  for (const GridSpec g : {GridSpec{6, 4, 0.2}, GridSpec{4, 7, 0.3}}) {
    for (int alpha : {0, 1}) {
      const double k = 0.7;
      const double dt = 0.05;
      const auto c_old = random_field(g, 2, 0.0, 3.0);
      const auto p = random_field(g, 3, 0.0, 5.0);
      const ImplicitSolver s(g, alpha, k, dt);
      const auto got = s.step(c_old, p);
      const auto want = ghost_oracle(g, alpha, k, dt, c_old, p);
      for (std::size_t n = 0; n < g.size(); ++n) EXPECT_NEAR(got.values()[n], want[n], 1e-11 * (1.0 + std::abs(want[n])));
    }
  }
}

TEST(ImplicitSolver, ConstantFixedPointAndUniformSteadyState) {
  const GridSpec g{9, 9, 0.1};
  const ImplicitSolver diff(g, 1, 0.0, 0.1);
  const auto c = diff.step(GridField(g, 2.5), GridField(g, 0.0));
  for (double v : c.values()) EXPECT_NEAR(v, 2.5, 1e-13);

  const ImplicitSolver ell(g, 0, 1.0, 0.1);
  const auto ce = ell.solve_elliptic(GridField(g, 1.75));
  for (double v : ce.values()) EXPECT_NEAR(v, 1.75, 1e-13);
  EXPECT_THROW(diff.solve_elliptic(GridField(g, 1.0)), NumericalError);
}

TEST(ImplicitSolver, RepeatedSteppingConvergesToSourceOverK2) {
  const GridSpec g{11, 11, 0.1};
  const double k = 1.5;
  const ImplicitSolver s(g, 1, k, 0.5);
  GridField c(g, 0.0);
  const GridField p(g, 3.0);
  for (int n = 0; n < 400; ++n) c = s.step(c, p);
  for (double v : c.values()) EXPECT_NEAR(v, 3.0 / (k * k), 1e-10 * 3.0 / (k * k));
}

TEST(ImplicitSolver, DecayWithoutSourceAndStability) {
  const GridSpec g{12, 10, 0.1};
  auto c = random_field(g, 7, -1.0, 1.0);
  for (double dt : {1e-3, 0.1, 10.0, 1e4}) {
    const ImplicitSolver s(g, 1, 0.5, dt);
    const auto next = s.step(c, GridField(g, 0.0));
    EXPECT_LE(next.max_abs(), c.max_abs() + 1e-14);
    EXPECT_LE(next.l2_norm(), c.l2_norm() + 1e-14);
  }
}

TEST(ImplicitSolver, NeumannDiffusionConservesIntegral) {
  const GridSpec g{17, 13, 0.1};
  auto c = random_field(g, 9, 0.0, 2.0);
  const double before = c.integral();
  const ImplicitSolver s(g, 1, 0.0, 0.05);
  for (int n = 0; n < 50; ++n) c = s.step(c, GridField(g, 0.0));
  EXPECT_NEAR(c.integral(), before, 1e-10 * before);
}

TEST(ImplicitSolver, PointSourceShape) {
  const GridSpec g{41, 41, 0.1};
  GridField p(g, 0.0);
  p(20, 20) = 1.0 / (g.dx * g.dx);
  const auto c = ImplicitSolver(g, 0, 1.0, 0.1).solve_elliptic(p);
  for (double v : c.values()) EXPECT_GT(v, 0.0);
  for (int i = 20; i < 40; ++i) {
    EXPECT_GT(c(i, 20), c(i + 1, 20));
    EXPECT_GT(c(20, i), c(20, i + 1));
  }
  EXPECT_NEAR(c.integral(), 1.0, 1e-10);
}

namespace {

// Max nodal error of one implicit step against the manufactured solution
// c_new = cos(pi x / L) cos(pi y / L), c_old = 0.
double manufactured_error(int n, int alpha) {
  const double l = 1.0;
  const double k = 1.0;
  const double dt = 0.1;
  const GridSpec g{n + 1, n + 1, l / n};
  const double q = std::numbers::pi / l;
  GridField p(g);
  GridField exact(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double v = std::cos(q * i * g.dx) * std::cos(q * j * g.dx);
      exact(i, j) = v;
      p(i, j) = v * ((alpha == 1 ? 1.0 / dt : 0.0) + 2.0 * q * q + k * k);
    }
  const auto c = ImplicitSolver(g, alpha, k, dt).step(GridField(g, 0.0), p);
  double e = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) e = std::max(e, std::abs(c.values()[m] - exact.values()[m]));
  return e;
}

}  // namespace

TEST(ImplicitSolver, ManufacturedSolutionSecondOrder) {
  for (int alpha : {0, 1}) {
    const double e1 = manufactured_error(16, alpha);
    const double e2 = manufactured_error(32, alpha);
    const double e3 = manufactured_error(64, alpha);
    EXPECT_GE(std::log2(e1 / e2), 1.9) << "alpha=" << alpha;
    EXPECT_GE(std::log2(e2 / e3), 1.9) << "alpha=" << alpha;
  }
}

TEST(ImplicitSolver, RejectsMismatchedOrNonFiniteInputs) {
  const GridSpec g{5, 5, 0.1};
  const ImplicitSolver s(g, 1, 1.0, 0.1);
  EXPECT_THROW(s.step(GridField(GridSpec{6, 5, 0.1}), GridField(g)), NumericalError);
  GridField bad(g, 0.0);
  bad(2, 2) = std::nan("");
  EXPECT_THROW(s.step(GridField(g), bad), NumericalError);
}
