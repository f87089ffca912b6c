#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kspic/config.hpp"
#include "kspic/nbody.hpp"
#include "kspic/singularity.hpp"

namespace kspic {

/// Plain-text notes plus a machine-readable key=value block, written as summary.txt.
struct Summary {
  std::vector<std::string> notes;
  KeyValues values;

  void add(const std::string& key, const std::string& value) { values.emplace_back(key, value); }
  void add(const std::string& key, double value);
  void add(const std::string& key, bool value);
  std::string text() const;
};

enum class Classification { aggregated, dispersed, ambiguous };
std::string to_string(Classification c);

struct SweepRun {
  double mass = 0.0;
  std::uint64_t seed = 0;
  Classification classification = Classification::ambiguous;
  double final_radius = 0.0;
  /// Heaviest atom at the final check (0 when none).
  double final_atom_mass = 0.0;
  /// Fraction of the checks inside the persistence window that saw an atom of mass >= theta.
  double persisted_fraction = 0.0;
};

struct SweepReport {
  std::vector<SweepRun> runs;
  double theta = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  /// False when M_lo is not dispersed or M_hi is not aggregated by majority.
  bool bracket_valid = false;
  /// Set when a midpoint classified ambiguous and bisection stopped early.
  bool ambiguous = false;
  /// M_c / 4, the free-space quarter mass of a corner trap.
  double quarter_mass = 0.0;
};

/// One hybrid run at the given mass and seed, classified at the end. dir may be empty.
SweepRun classify_sweep_run(const ExperimentConfig& cfg, double mass, std::uint64_t seed,
                            const std::filesystem::path& dir = {});

/// Majority verdict across seeds (ambiguous without a strict majority).
Classification majority(const std::vector<SweepRun>& runs);

/// Bisection (or grid) over M; runs of one mass fan out across cfg.threads workers.
SweepReport run_critical_mass_sweep(const ExperimentConfig& cfg, const std::filesystem::path& dir = {});

struct MergerReport {
  std::vector<Atom> initial_atoms;
  std::vector<AtomTrack> hybrid_tracks;
  std::vector<AtomTrack> ode_tracks;
  /// End of the window where both representations still hold two separate atoms.
  double compare_until = 0.0;
  double merge_time_hybrid = 0.0;
  double merge_time_ode = 0.0;
  double max_discrepancy = 0.0;
  double tolerance = 0.0;
  bool within_tolerance = false;
};

/// Hybrid run with atom tracking against RK4 integration of the point-atom ODE from the atoms
/// detected in the first frame. Throws NumericalError if no atom is detected initially.
MergerReport run_merger_compare(const ExperimentConfig& cfg, const std::filesystem::path& dir = {});

/// Atoms from the `atoms` key or, when empty, from the cluster/atomic initial condition.
std::vector<Atom> initial_atoms(const ExperimentConfig& cfg);

RadiusLawConfig radius_law_config(const ExperimentConfig& cfg, double mass_factor);
RadialProbeConfig radial_probe_config(const ExperimentConfig& cfg, double probe_factor);
HybridVsNBodyConfig hybrid_vs_nbody_config(const ExperimentConfig& cfg);

/// Runs cfg.mode, writing config/provenance, mode outputs and summary.txt into cfg.out_dir.
Summary run_experiment(const ExperimentConfig& cfg);

}  // namespace kspic
