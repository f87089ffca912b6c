#include "kspic/particles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "kspic/error.hpp"
#include "kspic/parallel.hpp"
#include "kspic/rng.hpp"

namespace kspic {

ParticleEnsemble::ParticleEnsemble(std::vector<Vec2> positions, double total_mass, std::uint64_t seed)
    : positions_(std::move(positions)), total_mass_(total_mass), seed_(seed) {
  if (positions_.empty()) throw NumericalError("ensemble: need at least one particle");
  if (!(total_mass > 0.0) || !std::isfinite(total_mass)) throw NumericalError("ensemble: total mass must be positive");
  mass_per_particle_ = total_mass_ / static_cast<double>(positions_.size());
}

void StepPolicy::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw NumericalError("step policy: dt must be positive");
  if (!(eta > 0.0 && eta <= 1.0)) throw NumericalError("step policy: eta must lie in (0, 1]");
  if (max_substeps < 1) throw NumericalError("step policy: max_substeps must be >= 1");
}

namespace {

double reflect_coordinate(double x, double length) {
  if (x >= 0.0 && x <= length) return x;
  // The mirror map has period 2L; fold once before iterating so far-off points terminate fast.
  const double period = 2.0 * length;
  if (std::abs(x) > period) x = std::fmod(x, period);
  for (int guard = 0; guard < 8 && (x < 0.0 || x > length); ++guard) {
    if (x < 0.0) x = -x;
    if (x > length) x = period - x;
  }
  return std::clamp(x, 0.0, length);
}

}  // namespace

Vec2 reflect(const Vec2& p, const GridSpec& domain) {
  if (!is_finite(p)) throw NumericalError("reflect: non-finite position");
  return {reflect_coordinate(p.x, domain.lx()), reflect_coordinate(p.y, domain.ly())};
}

AdvanceStats advance_particles(ParticleEnsemble& ens, const GridField& cx, const GridField& cy, double mu,
                               double chi, const StepPolicy& policy, int threads) {
  policy.validate();
  if (!(cx.spec() == cy.spec())) throw NumericalError("advance: gradient components differ in spec");
  if (mu < 0.0 || chi < 0.0) throw NumericalError("advance: mu and chi must be non-negative");
  const GridSpec& spec = cx.spec();
  const double dx = spec.dx;
  const double dt = policy.dt;
  const double min_tau = dt / policy.max_substeps;
  const double diff_tau = mu > 0.0 ? dx * dx / (2.0 * mu) : dt;
  const std::uint64_t seed = ens.seed();
  const std::uint64_t stream = ens.step_index();
  auto positions = ens.positions();

  std::vector<AdvanceStats> per_particle(positions.size());
  parallel_for(positions.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      StreamRng rng(seed, n, stream);
      std::normal_distribution<double> normal;
      Vec2 x = positions[n];
      double remaining = dt;
      int count = 0;
      bool clamped = false;
      while (remaining > 0.0) {
        const Vec2 g = sample_bilinear(cx, cy, x);
        if (!is_finite(g)) throw NumericalError("advance: non-finite gradient");
        double tau = remaining;
        const double speed = chi * norm(g);
        if (speed * tau > policy.eta * dx) tau = policy.eta * dx / speed;
        if (policy.diffusive_cap) tau = std::min(tau, diff_tau);
        if (tau < min_tau) {
          tau = std::min(min_tau, remaining);
          clamped = true;
        }
        if (remaining - tau <= 1e-12 * dt) tau = remaining;
        Vec2 step = chi * tau * g;
        if (mu > 0.0) {
          const double sigma = std::sqrt(2.0 * mu * tau);
          const double n1 = normal(rng);
          const double n2 = normal(rng);
          step += Vec2{sigma * n1, sigma * n2};
        }
        x = reflect(x + step, spec);
        remaining -= tau;
        ++count;
      }
      positions[n] = x;
      per_particle[n] = {static_cast<std::uint64_t>(count), count, clamped ? 1u : 0u};
    }
  });
  ens.advance_step_index();

  AdvanceStats total;
  for (const auto& s : per_particle) {
    total.substeps += s.substeps;
    total.max_substeps_taken = std::max(total.max_substeps_taken, s.max_substeps_taken);
    total.clamped_particles += s.clamped_particles;
  }
  return total;
}

GridField deposit_nodal_mass(std::span<const Vec2> positions, double mass_per_particle, const GridSpec& spec) {
  GridField mass(spec);
  for (const auto& p : positions) {
    const auto s = bilinear_stencil(spec, p);
    mass(s.i, s.j) += mass_per_particle * s.w[0];
    mass(s.i + 1, s.j) += mass_per_particle * s.w[1];
    mass(s.i, s.j + 1) += mass_per_particle * s.w[2];
    mass(s.i + 1, s.j + 1) += mass_per_particle * s.w[3];
  }
  return mass;
}

GridField nodal_mass_to_density(const GridField& nodal_mass) {
  const auto& spec = nodal_mass.spec();
  GridField density(spec);
  const double area = spec.dx * spec.dx;
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) density(i, j) = nodal_mass(i, j) / (spec.weight(i, j) * area);
  }
  return density;
}

GridField deposit(const ParticleEnsemble& ens, const GridSpec& spec) {
  return nodal_mass_to_density(deposit_nodal_mass(ens.positions(), ens.mass_per_particle(), spec));
}

}  // namespace kspic
