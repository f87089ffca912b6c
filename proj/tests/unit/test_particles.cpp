#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kspic/error.hpp"
#include "kspic/particles.hpp"

using namespace kspic;

namespace {

std::vector<Vec2> random_positions(const GridSpec& g, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, g.lx()), uy(0.0, g.ly());
  std::vector<Vec2> out(n);
  for (auto& p : out) p = {ux(rng), uy(rng)};
  return out;
}

}  // namespace

TEST(Reflect, Examples) {
  const GridSpec unit{11, 11, 0.1};
  const auto a = reflect({-0.1, 0.5}, unit);
  EXPECT_NEAR(a.x, 0.1, 1e-15);
  EXPECT_EQ(a.y, 0.5);
  const auto b = reflect({2.3, 0.5}, unit);
  EXPECT_NEAR(b.x, 0.3, 1e-14);
  const Vec2 inside{0.25, 0.75};
  EXPECT_EQ(reflect(inside, unit).x, inside.x);
  EXPECT_EQ(reflect(inside, unit).y, inside.y);
  EXPECT_EQ(reflect({1.0, 0.0}, unit).x, 1.0);
  EXPECT_THROW(reflect({std::nan(""), 0.0}, unit), NumericalError);
}

TEST(Deposit, NodeAndCellCenter) {
  const GridSpec g{6, 6, 0.2};
  const auto on_node = deposit_nodal_mass(std::vector<Vec2>{g.node(2, 3)}, 0.7, g);
  EXPECT_NEAR(on_node(2, 3), 0.7, 1e-15);
  double rest = 0.0;
  for (double v : on_node.values()) rest += v;
  EXPECT_NEAR(rest, 0.7, 1e-15);

  const auto center = deposit_nodal_mass(std::vector<Vec2>{{0.3, 0.5}}, 1.0, g);
  for (auto [i, j] : {std::pair{1, 2}, {2, 2}, {1, 3}, {2, 3}}) EXPECT_NEAR(center(i, j), 0.25, 1e-14);

  const ParticleEnsemble one(std::vector<Vec2>{g.node(0, 0)}, 2.0, 1);
  const auto p = deposit(one, g);
  EXPECT_NEAR(p(0, 0), 2.0 / (0.25 * g.dx * g.dx), 1e-10);
  EXPECT_NEAR(p.integral(), 2.0, 1e-14);
  EXPECT_THROW(deposit_nodal_mass(std::vector<Vec2>{{1.5, 0.2}}, 1.0, g), NumericalError);
}

TEST(Deposit, MassAndFirstMomentOnRandomEnsembles) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GridSpec g{33, 25, 0.1};
    const auto pos = random_positions(g, 5000, seed);
    const double m = 3.0 / 5000;
    const auto nodal = deposit_nodal_mass(pos, m, g);
    double mass = 0.0;
    Vec2 moment;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        mass += nodal(i, j);
        moment += nodal(i, j) * g.node(i, j);
      }
    Vec2 direct;
    for (const auto& p : pos) direct += m * p;
    EXPECT_NEAR(mass, 3.0, 1e-12 * 3.0);
    EXPECT_NEAR(moment.x, direct.x, 1e-12 * std::abs(direct.x));
    EXPECT_NEAR(moment.y, direct.y, 1e-12 * std::abs(direct.y));
    const ParticleEnsemble ens(pos, 3.0, seed);
    EXPECT_NEAR(deposit(ens, g).integral(), 3.0, 1e-12 * 3.0);
  }
}

TEST(Advance, FrozenWithoutDriftOrNoise) {
  const GridSpec g{11, 11, 0.1};
  ParticleEnsemble ens(random_positions(g, 100, 2), 1.0, 2);
  const std::vector<Vec2> before(ens.positions().begin(), ens.positions().end());
  GridField cx(g, 3.0), cy(g, -1.0);
  advance_particles(ens, cx, cy, 0.0, 0.0, StepPolicy{});
  for (std::size_t n = 0; n < before.size(); ++n) {
    EXPECT_EQ(ens.positions()[n].x, before[n].x);
    EXPECT_EQ(ens.positions()[n].y, before[n].y);
  }
  EXPECT_EQ(ens.step_index(), 1u);
}

TEST(Advance, SingleSubstepDeterministicDrift) {
  const GridSpec g{33, 33, 0.1};
  ParticleEnsemble ens(std::vector<Vec2>{{1.0, 1.0}}, 1.0, 1);
  StepPolicy pol;
  pol.dt = 0.1;
  const double a = 0.5;
  const auto stats = advance_particles(ens, GridField(g, a), GridField(g, 0.0), 0.0, 1.0, pol);
  EXPECT_EQ(stats.substeps, 1u);
  EXPECT_NEAR(ens.positions()[0].x, 1.0 + a * pol.dt, 1e-15);
  EXPECT_EQ(ens.positions()[0].y, 1.0);
}

TEST(Advance, TenSubstepsWhenDriftIsTenCells) {
  const GridSpec g{33, 33, 0.1};
  ParticleEnsemble ens(std::vector<Vec2>{{0.5, 1.0}}, 1.0, 1);
  StepPolicy pol;
  pol.dt = 0.01;
  pol.eta = 1.0;
  const double chi = 2.0;
  const double gx = 10.0 * g.dx / (chi * pol.dt);
  const auto stats = advance_particles(ens, GridField(g, gx), GridField(g, 0.0), 0.0, chi, pol);
  EXPECT_EQ(stats.substeps, 10u);
  EXPECT_EQ(stats.max_substeps_taken, 10);
  EXPECT_NEAR(ens.positions()[0].x, 0.5 + chi * gx * pol.dt, 1e-13);
}

TEST(Advance, SubstepBudgetClampsWithoutAborting) {
  const GridSpec g{33, 33, 0.1};
  ParticleEnsemble ens(std::vector<Vec2>{{0.5, 1.0}, {2.0, 2.0}}, 1.0, 1);
  StepPolicy pol;
  pol.dt = 0.01;
  pol.max_substeps = 4;
  const double gx = 100.0 * g.dx / pol.dt;
  const auto stats = advance_particles(ens, GridField(g, gx), GridField(g, 0.0), 0.0, 1.0, pol);
  EXPECT_EQ(stats.clamped_particles, 2u);
  EXPECT_LE(stats.max_substeps_taken, 4);
  for (const auto& p : ens.positions()) EXPECT_TRUE(g.contains(p));
}

TEST(Advance, RejectsNonFiniteGradient) {
  const GridSpec g{11, 11, 0.1};
  ParticleEnsemble ens(std::vector<Vec2>{{0.5, 0.5}}, 1.0, 1);
  GridField cx(g, 0.0);
  cx(5, 5) = std::nan("");
  EXPECT_THROW(advance_particles(ens, cx, GridField(g, 0.0), 0.0, 1.0, StepPolicy{}), NumericalError);
}

TEST(Advance, VarianceGrowsAtTwoMu) {
  const GridSpec g = GridSpec::from_lengths(3.2, 3.2, 0.05);
  const std::size_t n = 100000;
  ParticleEnsemble ens(std::vector<Vec2>(n, Vec2{1.6, 1.6}), 1.0, 42);
  const double mu = 0.005;
  StepPolicy pol;
  pol.dt = 0.1;
  advance_particles(ens, GridField(g), GridField(g), mu, 0.0, pol);
  Vec2 mean;
  for (const auto& p : ens.positions()) mean += p;
  mean *= 1.0 / n;
  double vx = 0.0, vy = 0.0;
  for (const auto& p : ens.positions()) {
    vx += (p.x - mean.x) * (p.x - mean.x);
    vy += (p.y - mean.y) * (p.y - mean.y);
  }
  vx /= n - 1;
  vy /= n - 1;
  const double expected = 2.0 * mu * pol.dt;
  const double rel_se = std::sqrt(2.0 / (n - 1));
  EXPECT_LT(std::abs(vx / expected - 1.0), std::max(0.05, 3.0 * rel_se));
  EXPECT_LT(std::abs(vy / expected - 1.0), std::max(0.05, 3.0 * rel_se));
}

TEST(Advance, DeterministicAcrossThreadCounts) {
  const GridSpec g{33, 33, 0.1};
  GridField cx(g), cy(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      cx(i, j) = std::sin(i * 0.3) * 4.0;
      cy(i, j) = std::cos(j * 0.2) * 4.0;
    }
  const auto pos = random_positions(g, 3000, 9);
  ParticleEnsemble a(pos, 1.0, 77), b(pos, 1.0, 77);
  StepPolicy pol;
  for (int s = 0; s < 3; ++s) {
    advance_particles(a, cx, cy, 0.01, 0.5, pol, 1);
    advance_particles(b, cx, cy, 0.01, 0.5, pol, 4);
  }
  for (std::size_t n = 0; n < pos.size(); ++n) {
    EXPECT_EQ(a.positions()[n].x, b.positions()[n].x);
    EXPECT_EQ(a.positions()[n].y, b.positions()[n].y);
  }
}

TEST(StepPolicy, Validation) {
  StepPolicy p;
  p.eta = 1.5;
  EXPECT_THROW(p.validate(), NumericalError);
  p.eta = 1.0;
  p.max_substeps = 0;
  EXPECT_THROW(p.validate(), NumericalError);
}

TEST(ParticleEnsemble, Invariants) {
  const ParticleEnsemble e(std::vector<Vec2>(8, Vec2{0.1, 0.1}), 2.0, 1);
  EXPECT_DOUBLE_EQ(e.mass_per_particle() * 8, 2.0);
  EXPECT_THROW(ParticleEnsemble({}, 1.0, 1), NumericalError);
  EXPECT_THROW(ParticleEnsemble(std::vector<Vec2>(2), 0.0, 1), NumericalError);
}
