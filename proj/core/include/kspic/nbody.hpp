#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kspic/green.hpp"
#include "kspic/grid.hpp"
#include "kspic/hybrid.hpp"
#include "kspic/vec2.hpp"

namespace kspic {

struct NBodyParams {
  Kernel kernel = Kernel::log2d();
  double mu = 0.005;
  double chi = 0.1;
  /// Pairwise distances are clamped to max(r, eps) inside dV/dr.
  double eps = 1e-3;
  /// Coalescing self-gravitating variant: particles closer than r_merge fuse and their noise
  /// amplitude becomes sqrt(2 mu M / (N0 m)).
  bool coalesce = false;
  /// Non-positive means "use eps".
  double r_merge = 0.0;

  double merge_radius() const { return r_merge > 0.0 ? r_merge : eps; }
};

/// Free-space interacting particle system with per-particle masses.
class NBodyState {
 public:
  NBodyState(std::vector<Vec2> positions, double total_mass, NBodyParams params, std::uint64_t seed);

  std::size_t size() const { return positions_.size(); }
  std::size_t initial_count() const { return n0_; }
  double total_mass() const { return total_mass_; }
  double time() const { return t_; }
  std::uint64_t step_index() const { return step_; }
  const NBodyParams& params() const { return params_; }
  std::span<const Vec2> positions() const { return positions_; }
  std::span<const double> masses() const { return masses_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t merge_count() const { return merges_; }

  /// Noise amplitude sqrt(2 mu M / (N0 m_n)) of particle n.
  double diffusion_amplitude(std::size_t n) const;

 private:
  friend void nbody_step(NBodyState&, double, int);

  std::vector<Vec2> positions_;
  std::vector<double> masses_;
  /// Stable identity of each particle, used to key its noise stream.
  std::vector<std::uint64_t> ids_;
  double total_mass_;
  std::size_t n0_;
  NBodyParams params_;
  std::uint64_t seed_;
  std::uint64_t step_ = 0;
  double t_ = 0.0;
  std::size_t merges_ = 0;
};

/// Drift of particle n: -chi sum_{j != n} m_j grad V(X_n, X_j) (regularised).
std::vector<Vec2> nbody_drift(const NBodyState& state, int threads = 1);

/// Euler-Maruyama step; then, in the coalescing variant, pairs closer than the merge radius
/// fuse (mass-weighted position, masses add).
void nbody_step(NBodyState& state, double dtau, int threads = 1);

/// Radius of each saved frame.
std::vector<double> radius_series(const std::vector<std::vector<Vec2>>& frames);

// ---------------------------------------------------------------------------------------

struct RadiusLawConfig {
  double mu = 0.005;
  double chi = 0.1;
  double mass = 1.0;
  std::size_t n_particles = 1000;
  /// Initial ensembles are isotropic Gaussians with this radius.
  double r0 = 0.5;
  int n_runs = 50;
  std::uint64_t seed = 1;
  double dt = 0.01;
  double frame_dt = 0.1;
  /// Slope fit window [0, t_fit]; supercritical runs cap it at 0.8 of the predicted blow-up.
  double t_fit = 10.0;
  /// A run stops once R <= stop_radius (the collapse floor); later frames are excluded.
  double stop_radius = 0.02;
  double eps = 1e-3;
  /// Near collapse the step is reduced to adapt * R^2 / (chi M / 2 pi).
  double adapt = 0.05;
  int threads = 1;
};

struct RadiusLawReport {
  double mass = 0.0;
  double critical_mass = 0.0;
  std::size_t n_particles = 0;
  int runs = 0;
  double predicted_slope = 0.0;
  double fitted_slope = 0.0;
  double slope_stderr = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double relative_error = 0.0;
  double mean_r0_sq = 0.0;
  bool supercritical = false;
  /// R0^2 / gamma with gamma = 4 mu (M/Mc - 1); NaN when not supercritical.
  double predicted_blowup = 0.0;
  /// Mean first time R <= stop_radius over collapsed runs; NaN if none collapsed.
  double measured_blowup = 0.0;
  int runs_collapsed = 0;
  /// Ensemble mean R^2 at predicted_blowup (linear in the saved frames); NaN if not reached.
  double r2_at_blowup = 0.0;
  std::vector<double> times;
  std::vector<double> mean_r2;
};

/// M_c = 8 pi mu / chi.
double critical_mass(double mu, double chi);
/// M_c* = 4 pi mu / chi.
double sustaining_mass(double mu, double chi);
/// (1 - 1/N)(4 mu - chi M / 2 pi).
double predicted_r2_slope(double mu, double chi, double mass, std::size_t n);

/// Ensemble of direct log-kernel simulations; least-squares slope of R^2(t) per run, averaged
/// across runs with a 3-sigma interval.
RadiusLawReport radius_law_check(const RadiusLawConfig& config);

// ---------------------------------------------------------------------------------------

struct RadialProbeConfig {
  double mu = 0.005;
  double chi = 0.1;
  double mass = 0.0;
  /// Used only with full_k0_drift.
  double k = 1.0;
  double r0 = 0.5;
  double t_end = 10.0;
  std::size_t n_trials = 10000;
  double eps_hit = 1e-3;
  double r_max = 5.0;
  double dt = 1e-3;
  /// Replace the leading-order log drift by chi M k K1(k r) / 2 pi.
  bool full_k0_drift = false;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct RadialProbeResult {
  double mass = 0.0;
  std::size_t trials = 0;
  std::size_t absorbed = 0;
  double absorbed_fraction = 0.0;
  /// Binomial standard error of absorbed_fraction.
  double stderr_fraction = 0.0;
  /// NaN when nothing was absorbed.
  double mean_hit_time = 0.0;
};

/// dr = (mu - chi M / 2 pi) dt / r + sqrt(2 mu) dW, absorbed at r <= eps_hit, reflected at r_max.
RadialProbeResult radial_probe(const RadialProbeConfig& config);

// ---------------------------------------------------------------------------------------

struct HybridVsNBodyConfig {
  GridSpec grid;
  PhysicsParams physics;  // elliptic, k > 0
  InitialCondition init;
  std::size_t n_particles = 500;
  std::uint64_t seed = 1;
  double dt = 0.01;
  double t_end = 1.0;
  int frame_every = 10;
  double eps = 1e-3;
  double r_tolerance = 0.05;
  int threads = 1;
};

struct HybridVsNBodyReport {
  std::vector<double> times;
  std::vector<double> r_hybrid;
  std::vector<double> r_nbody;
  double max_r_discrepancy = 0.0;
  bool within_tolerance = false;
  std::vector<Atom> atoms_hybrid;
  std::vector<Atom> atoms_nbody;
};

/// Runs the grid-coupled method and the direct O(N^2) system (K0 kernel) from the same
/// initial particles and compares radius series and final atoms.
HybridVsNBodyReport hybrid_vs_nbody(const HybridVsNBodyConfig& config);

}  // namespace kspic
