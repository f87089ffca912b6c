#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kspic/hybrid.hpp"
#include "kspic/particles.hpp"

namespace kspic {

enum class Mode {
  hybrid,
  nbody,
  atom_ode,
  radial_probe,
  radius_law,
  critical_mass_sweep,
  merger_compare,
  hybrid_vs_nbody,
};

Mode parse_mode(const std::string& text);
std::string to_string(Mode mode);

/// Every knob of a run. Field defaults are the library defaults; presets overwrite a subset.
struct ExperimentConfig {
  Mode mode = Mode::hybrid;
  std::string preset;

  PhysicsParams physics{1, 0.005, 0.1, 1.0, 25.0};
  double lx = 3.2;
  double ly = 3.2;
  double dx = 0.05;
  StepPolicy policy;
  std::size_t n_particles = 4096;
  std::uint64_t seed = 1;
  double t_end = 10.0;
  int threads = 1;
  InitialCondition init;

  std::filesystem::path out_dir = "kspic_out";
  int diag_every = 1;
  int snapshot_every = 100;
  bool snapshot_csv = false;
  bool particle_snapshots = true;
  bool subtract_mean_field = false;

  /// Non-positive: derive from physics (2 pi mu / chi, 3 dx, 2 dx).
  double theta_mass = 0.0;
  double r_cluster = 0.0;
  double max_jump = 0.0;

  // nbody
  std::string kernel = "log2d";
  double eps = 1e-3;
  double r_merge = 0.0;
  bool coalesce = false;
  double nbody_dt = 0.01;
  int frame_every = 10;

  // atom-ode; "x:y:mass;..." (empty: taken from the cluster initial condition)
  std::string atoms;
  double ode_dt = 1e-3;

  // radius-law
  std::vector<double> mass_factors{0.5, 1.0, 2.0};
  int n_runs = 50;
  double r0 = 0.5;
  double fit_t = 10.0;
  double frame_dt = 0.1;
  double stop_radius = 0.02;

  // radial-probe
  std::vector<double> probe_factors{0.5, 1.0, 2.0};
  double probe_r0 = 0.5;
  double probe_t = 10.0;
  std::size_t n_trials = 10000;
  double eps_hit = 1e-3;
  double r_max = 5.0;
  double probe_dt = 1e-3;
  bool full_k0_drift = false;

  // critical-mass-sweep
  double m_lo = 0.2;
  double m_hi = 0.5;
  int sweep_seeds = 3;
  int sweep_iters = 4;
  std::string sweep_method = "bisection";
  std::vector<double> sweep_masses;
  double persist_frac = 0.2;
  double disperse_frac = 0.25;
  /// Non-positive: pi mu / chi, a quarter of the sustaining mass (a corner trap).
  double sweep_theta = 0.0;
  int check_every = 50;

  // merger-compare / hybrid-vs-nbody
  bool full_scale = false;
  double merger_tolerance = 0.0;
  double r_tolerance = 0.05;

  GridSpec grid() const { return GridSpec::from_lengths(lx, ly, dx); }
  DetectionParams detection() const;
  OutputPolicy output_policy() const;

  /// Checks every cross-field invariant; throws ConfigError naming the offending key.
  void validate() const;
};

/// key=value pairs in the order they were given.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Flat `key=value` text with `#` comments and blank lines.
KeyValues parse_key_values(const std::string& text, const std::string& origin);
KeyValues read_config_file(const std::filesystem::path& path);

/// Resolves mode + preset + file + flag overrides (later sources win) into a validated
/// config. Unknown keys and malformed values throw ConfigError.
ExperimentConfig parse_config(Mode mode, const KeyValues& file_values, const KeyValues& overrides);

/// Applies a named preset (fig1, fig4, fig5, fig6) to cfg.
void apply_preset(ExperimentConfig& cfg, const std::string& name);
std::vector<std::string> preset_names();
/// Modelling choices a preset fills in, for provenance output.
std::vector<std::string> preset_assumptions(const std::string& name);

/// Canonical resolved text (`key=value` per line, sorted by key). Round-trips through
/// parse_config.
std::string to_config_text(const ExperimentConfig& cfg);

/// Key names with one-line descriptions, for --help.
std::vector<std::pair<std::string, std::string>> config_key_help();

}  // namespace kspic
