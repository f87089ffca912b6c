#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kspic/grid.hpp"
#include "kspic/particles.hpp"
#include "kspic/singularity.hpp"

namespace kspic {

struct PhysicsParams {
  int alpha = 1;
  double mu = 0.005;
  double chi = 0.1;
  double k = 1.0;
  double mass = 1.0;

  bool elliptic() const { return alpha == 0; }
  void validate() const;
};

struct ClusterSpec {
  Vec2 center;
  double sigma = 0.0;
  double fraction = 1.0;
};

struct InitialCondition {
  enum class Kind { uniform, corner, clusters, atomic, random_clusters };
  Kind kind = Kind::uniform;
  /// Corner-biased mixture: this fraction from a Gaussian of width corner_sigma folded into
  /// the domain at the origin, the rest uniform.
  double corner_fraction = 0.5;
  double corner_sigma = 0.5;
  /// Gaussian blobs (clusters) or point masses (atomic; sigma ignored). Fractions are
  /// normalised by their sum.
  std::vector<ClusterSpec> clusters;
  /// Random clusters: random_fraction of the particles split evenly over random_count Gaussian
  /// blobs of width random_sigma whose centres are drawn uniformly from the seed; the rest uniform.
  int random_count = 8;
  double random_sigma = 0.15;
  double random_fraction = 0.5;
  /// Parabolic runs only: initial concentration c0 + c0_noise * U(-1, 1) per node.
  double c0 = 0.0;
  double c0_noise = 0.0;
};

/// Positions for n particles; deterministic in seed. Throws for cluster centres outside the
/// domain or non-positive fractions.
std::vector<Vec2> sample_initial_positions(const InitialCondition& ic, const GridSpec& grid, std::size_t n,
                                           std::uint64_t seed);

struct DiagnosticsRow {
  double t = 0.0;
  double mass = 0.0;
  double radius = 0.0;
  std::optional<double> energy;
  int n_singularities = 0;
  double max_c = 0.0;
};

struct SimState {
  double t = 0.0;
  ParticleEnsemble ensemble;
  /// Parabolic: concentration at t. Elliptic: solve of the deposit of the current positions.
  GridField c;
  std::vector<DiagnosticsRow> diagnostics;
  std::uint64_t steps = 0;
  std::uint64_t substeps = 0;
  std::uint64_t clamped_particles = 0;
};

SimState init_state(const GridSpec& grid, const PhysicsParams& physics, const InitialCondition& ic,
                    std::size_t n_particles, std::uint64_t seed);

struct OutputPolicy {
  /// Empty: keep diagnostics in memory only.
  std::filesystem::path dir;
  int diag_every = 1;
  /// 0 disables snapshots.
  int snapshot_every = 100;
  bool snapshot_csv = false;
  bool particle_snapshots = true;
  /// Write c - M/(k^2 Lx Ly) instead of c in grid snapshots.
  bool subtract_mean_field = false;
  /// Atom detection used for the n_singularities column.
  DetectionParams detection;
};

/// Called after every macro step with the updated state.
using StepObserver = std::function<void(const SimState&)>;

/// Macro steps of policy.dt until t_end: deposit, concentration update (implicit parabolic
/// step or elliptic solve), gradient, particle advance. Diagnostics are recorded at t0 and
/// every diag_every steps; snapshots every snapshot_every steps. On error the diagnostics
/// gathered so far are flushed before rethrowing.
void run(SimState& state, const PhysicsParams& physics, const StepPolicy& policy, double t_end,
         const OutputPolicy& output, const StepObserver& observer = {}, int threads = 1);

/// E = mu sum w P ln P dx^2 - (chi/2) sum w P C dx^2 with 0 ln 0 = 0.
double energy(const GridField& p, const GridField& c, double mu, double chi);
/// Energy of the current state; elliptic model only.
double energy(const SimState& state, const PhysicsParams& physics);

/// R with R^2 = (1/2N^2) sum_ij |X_i - X_j|^2, via the O(N) variance identity.
double radius(std::span<const Vec2> positions);

DiagnosticsRow compute_diagnostics(const SimState& state, const PhysicsParams& physics,
                                   const DetectionParams& detection);

/// Columns t,mass,R,E,n_singularities,max_C (E empty for parabolic runs).
void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticsRow>& rows);

}  // namespace kspic
