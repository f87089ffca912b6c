#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kspic/grid.hpp"
#include "kspic/vec2.hpp"

namespace kspic {

/// Equal-mass particle representation of the density. Each particle draws its noise from a
/// stream keyed by (seed, particle index, macro step).
class ParticleEnsemble {
 public:
  ParticleEnsemble(std::vector<Vec2> positions, double total_mass, std::uint64_t seed);

  std::size_t size() const { return positions_.size(); }
  double total_mass() const { return total_mass_; }
  double mass_per_particle() const { return mass_per_particle_; }
  std::uint64_t seed() const { return seed_; }
  /// Number of macro steps taken so far; selects the next RNG stream.
  std::uint64_t step_index() const { return step_index_; }

  std::span<const Vec2> positions() const { return positions_; }
  std::span<Vec2> positions() { return positions_; }

  void advance_step_index() { ++step_index_; }

 private:
  std::vector<Vec2> positions_;
  double total_mass_;
  double mass_per_particle_;
  std::uint64_t seed_;
  std::uint64_t step_index_ = 0;
};

struct StepPolicy {
  double dt = 0.1;
  /// Substep safety factor: chi |grad c| dtau <= eta dx.
  double eta = 1.0;
  int max_substeps = 10000;
  /// Additionally limit sqrt(2 mu dtau) <= dx.
  bool diffusive_cap = false;

  void validate() const;
};

struct AdvanceStats {
  std::uint64_t substeps = 0;
  int max_substeps_taken = 0;
  /// Particles that hit the substep budget and had their step clamped.
  std::uint64_t clamped_particles = 0;
};

/// Mirror x -> -x at 0 and x -> 2L - x at L per coordinate until inside.
Vec2 reflect(const Vec2& p, const GridSpec& domain);

/// One macro step of length policy.dt for every particle, with per-particle adaptive
/// substeps and the gradient fields frozen. Thread count does not affect the result.
AdvanceStats advance_particles(ParticleEnsemble& ens, const GridField& cx, const GridField& cy, double mu,
                               double chi, const StepPolicy& policy, int threads = 1);

/// Bilinear (cloud-in-cell) nodal masses; their plain sum is the total mass.
GridField deposit_nodal_mass(std::span<const Vec2> positions, double mass_per_particle, const GridSpec& spec);

/// Density P = nodal mass / (w_ij dx^2); its quadrature integral equals the total mass.
GridField deposit(const ParticleEnsemble& ens, const GridSpec& spec);
GridField nodal_mass_to_density(const GridField& nodal_mass);

}  // namespace kspic
