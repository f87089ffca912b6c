#include "kspic/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "kspic/error.hpp"
#include "kspic/parallel.hpp"
#include "kspic/provenance.hpp"
#include "kspic/snapshot_io.hpp"

namespace kspic {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw NumericalError("cannot write " + path.string());
  return os;
}

double max_jump_of(const ExperimentConfig& cfg) { return cfg.max_jump > 0.0 ? cfg.max_jump : 2.0 * cfg.dx; }

double sweep_theta_of(const ExperimentConfig& cfg) {
  return cfg.sweep_theta > 0.0 ? cfg.sweep_theta : std::numbers::pi * cfg.physics.mu / cfg.physics.chi;
}

Kernel kernel_of(const ExperimentConfig& cfg) {
  return cfg.kernel == "bessel2d" ? Kernel::bessel2d(cfg.physics.k) : Kernel::log2d();
}

std::string mass_tag(double m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "M_%.6f", m);
  return buf;
}

/// Position of a track at time t by linear interpolation; NaN outside its span.
Vec2 track_position(const AtomTrack& tr, double t) {
  const auto& pts = tr.points;
  if (pts.empty() || t < pts.front().t || t > pts.back().t) return {kNaN, kNaN};
  const auto it = std::lower_bound(pts.begin(), pts.end(), t, [](const TrackPoint& p, double v) { return p.t < v; });
  if (it->t == t || it == pts.begin()) return it->position;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double s = (t - a.t) / (b.t - a.t);
  return a.position + s * (b.position - a.position);
}

}  // namespace

// ---------------------------------------------------------------------------------------

void Summary::add(const std::string& key, double value) { add(key, format_double(value)); }
void Summary::add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

std::string Summary::text() const {
  std::string out;
  for (const auto& n : notes) out += n + '\n';
  out += "\n[summary]\n";
  for (const auto& [k, v] : values) out += k + '=' + v + '\n';
  return out;
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::aggregated: return "aggregated";
    case Classification::dispersed: return "dispersed";
    case Classification::ambiguous: return "ambiguous";
  }
  return "ambiguous";
}

// ---------------------------------------------------------------------------------------

SweepRun classify_sweep_run(const ExperimentConfig& cfg, double mass, std::uint64_t seed,
                            const std::filesystem::path& dir) {
  PhysicsParams physics = cfg.physics;
  physics.mass = mass;
  const GridSpec grid = cfg.grid();
  const double theta = sweep_theta_of(cfg);
  DetectionParams det = cfg.detection();
  det.theta_mass = theta;

  SimState state = init_state(grid, physics, cfg.init, cfg.n_particles, seed);
  OutputPolicy out = cfg.output_policy();
  out.dir = dir;
  out.detection = det;

  const double window_start = (1.0 - cfg.persist_frac) * cfg.t_end;
  const double last_t = cfg.t_end - 0.5 * cfg.policy.dt;
  int checks = 0;
  int seen = 0;
  double final_atom = 0.0;
  const auto observer = [&](const SimState& s) {
    const bool last = s.t >= last_t;
    if (!last && s.steps % static_cast<std::uint64_t>(cfg.check_every) != 0) return;
    if (s.t < window_start) return;
    const auto atoms = detect_atoms(s.ensemble.positions(), s.ensemble.mass_per_particle(), grid, det);
    double heaviest = 0.0;
    for (const auto& a : atoms) heaviest = std::max(heaviest, a.mass);
    ++checks;
    if (heaviest >= theta) ++seen;
    if (last) final_atom = heaviest;
  };
  if (!dir.empty()) std::filesystem::create_directories(dir);
  run(state, physics, cfg.policy, cfg.t_end, out, observer, 1);

  SweepRun r;
  r.mass = mass;
  r.seed = seed;
  r.final_radius = radius(state.ensemble.positions());
  r.final_atom_mass = final_atom;
  r.persisted_fraction = checks > 0 ? static_cast<double>(seen) / checks : 0.0;
  const double diagonal = std::hypot(grid.lx(), grid.ly());
  if (checks > 0 && seen == checks) {
    r.classification = Classification::aggregated;
  } else if (r.final_radius > cfg.disperse_frac * diagonal) {
    r.classification = Classification::dispersed;
  } else {
    r.classification = Classification::ambiguous;
  }
  return r;
}

Classification majority(const std::vector<SweepRun>& runs) {
  std::size_t agg = 0;
  std::size_t disp = 0;
  for (const auto& r : runs) {
    if (r.classification == Classification::aggregated) ++agg;
    if (r.classification == Classification::dispersed) ++disp;
  }
  if (2 * agg > runs.size()) return Classification::aggregated;
  if (2 * disp > runs.size()) return Classification::dispersed;
  return Classification::ambiguous;
}

SweepReport run_critical_mass_sweep(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  if (!cfg.physics.elliptic()) throw ConfigError("alpha", "critical-mass-sweep needs the elliptic model");
  SweepReport report;
  report.theta = sweep_theta_of(cfg);
  report.quarter_mass = critical_mass(cfg.physics.mu, cfg.physics.chi) / 4.0;

  const auto sweep_mass = [&](double m) {
    std::vector<SweepRun> runs(static_cast<std::size_t>(cfg.sweep_seeds));
    parallel_for(runs.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint64_t seed = cfg.seed + i;
        const auto sub = dir.empty() ? std::filesystem::path{}
                                     : dir / "runs" / (mass_tag(m) + "_seed_" + std::to_string(seed));
        runs[i] = classify_sweep_run(cfg, m, seed, sub);
      }
    });
    report.runs.insert(report.runs.end(), runs.begin(), runs.end());
    return majority(runs);
  };

  if (cfg.sweep_method == "grid") {
    auto masses = cfg.sweep_masses;
    std::sort(masses.begin(), masses.end());
    std::vector<Classification> verdicts;
    for (double m : masses) verdicts.push_back(sweep_mass(m));
    double lo = kNaN;
    double hi = kNaN;
    for (std::size_t i = 0; i < masses.size(); ++i) {
      if (verdicts[i] == Classification::aggregated) {
        hi = masses[i];
        break;
      }
      if (verdicts[i] == Classification::dispersed) lo = masses[i];
      if (verdicts[i] == Classification::ambiguous) report.ambiguous = true;
    }
    report.bracket_lo = lo;
    report.bracket_hi = hi;
    report.bracket_valid = std::isfinite(lo) && std::isfinite(hi);
    return report;
  }

  double lo = cfg.m_lo;
  double hi = cfg.m_hi;
  const auto v_lo = sweep_mass(lo);
  const auto v_hi = sweep_mass(hi);
  report.bracket_valid = v_lo == Classification::dispersed && v_hi == Classification::aggregated;
  if (report.bracket_valid) {
    for (int it = 0; it < cfg.sweep_iters; ++it) {
      const double mid = 0.5 * (lo + hi);
      const auto v = sweep_mass(mid);
      if (v == Classification::aggregated) {
        hi = mid;
      } else if (v == Classification::dispersed) {
        lo = mid;
      } else {
        report.ambiguous = true;
        break;
      }
    }
  }
  report.bracket_lo = lo;
  report.bracket_hi = hi;
  return report;
}

// ---------------------------------------------------------------------------------------

std::vector<Atom> initial_atoms(const ExperimentConfig& cfg) {
  std::vector<Atom> atoms;
  if (!cfg.atoms.empty()) {
    std::istringstream is(cfg.atoms);
    std::string item;
    while (std::getline(is, item, ';')) {
      if (item.find_first_not_of(" \t") == std::string::npos) continue;
      std::replace(item.begin(), item.end(), ':', ' ');
      std::istringstream fields(item);
      Atom a;
      std::string extra;
      if (!(fields >> a.position.x >> a.position.y >> a.mass) || (fields >> extra)) {
        throw ConfigError("atoms", "expected x:y:mass entries separated by ';'");
      }
      if (!(a.mass > 0.0)) throw ConfigError("atoms", "atom masses must be positive");
      a.id = static_cast<int>(atoms.size());
      atoms.push_back(a);
    }
    if (atoms.empty()) throw ConfigError("atoms", "no atoms given");
    return atoms;
  }
  if (cfg.init.clusters.empty()) throw ConfigError("atoms", "give atoms=x:y:mass;... or a cluster initial condition");
  double total = 0.0;
  for (const auto& c : cfg.init.clusters) total += c.fraction;
  for (const auto& c : cfg.init.clusters) {
    Atom a;
    a.id = static_cast<int>(atoms.size());
    a.position = c.center;
    a.mass = cfg.physics.mass * c.fraction / total;
    atoms.push_back(a);
  }
  return atoms;
}

MergerReport run_merger_compare(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  if (!cfg.physics.elliptic()) throw ConfigError("alpha", "merger-compare needs the elliptic model");
  const GridSpec grid = cfg.grid();
  const DetectionParams det = cfg.detection();
  const double max_jump = max_jump_of(cfg);

  MergerReport report;
  report.tolerance = cfg.merger_tolerance > 0.0 ? cfg.merger_tolerance : (cfg.full_scale ? 1.0 : 2.0) * cfg.dx;

  SimState state = init_state(grid, cfg.physics, cfg.init, cfg.n_particles, cfg.seed);
  report.initial_atoms = detect_atoms(state.ensemble.positions(), state.ensemble.mass_per_particle(), grid, det);
  if (report.initial_atoms.empty()) {
    throw NumericalError("merger-compare: no atom detected in the first frame (initial masses must exceed theta_mass)");
  }
  auto tracks = track_atoms({}, report.initial_atoms, state.t, max_jump);
  const std::size_t n0 = report.initial_atoms.size();

  std::vector<Atom> ode_atoms;
  for (const auto& tr : tracks) {
    Atom a;
    a.id = tr.id;
    a.position = tr.points.front().position;
    a.mass = tr.points.front().mass;
    ode_atoms.push_back(a);
  }

  report.merge_time_hybrid = kInf;
  const auto observer = [&](const SimState& s) {
    if (s.steps % static_cast<std::uint64_t>(cfg.frame_every) != 0) return;
    const auto atoms = detect_atoms(s.ensemble.positions(), s.ensemble.mass_per_particle(), grid, det);
    tracks = track_atoms(std::move(tracks), atoms, s.t, max_jump);
    if (atoms.size() < n0 && !std::isfinite(report.merge_time_hybrid)) report.merge_time_hybrid = s.t;
  };
  OutputPolicy out = cfg.output_policy();
  out.dir = dir;
  if (!dir.empty()) std::filesystem::create_directories(dir);
  run(state, cfg.physics, cfg.policy, cfg.t_end, out, observer, cfg.threads);
  report.hybrid_tracks = std::move(tracks);

  AtomOdeOptions opt;
  opt.dt = cfg.ode_dt;
  opt.t_end = cfg.t_end;
  opt.r_merge = cfg.r_merge > 0.0 ? cfg.r_merge : cfg.dx;
  const Kernel kernel = cfg.physics.k > 0.0 ? Kernel::bessel2d(cfg.physics.k) : Kernel::log2d();
  report.ode_tracks = integrate_atom_ode(ode_atoms, kernel, cfg.physics.chi, opt);

  report.merge_time_ode = kInf;
  for (const auto& tr : report.ode_tracks) {
    for (const auto& p : tr.points) {
      if (p.mass > tr.points.front().mass) {
        report.merge_time_ode = std::min(report.merge_time_ode, p.t);
        break;
      }
    }
  }
  report.compare_until = std::min({report.merge_time_hybrid, report.merge_time_ode, cfg.t_end});

  for (const auto& ht : report.hybrid_tracks) {
    const auto ot = std::find_if(report.ode_tracks.begin(), report.ode_tracks.end(),
                                 [&](const AtomTrack& o) { return o.id == ht.id; });
    if (ot == report.ode_tracks.end()) continue;
    for (const auto& p : ht.points) {
      const bool inside = p.t < report.compare_until || (report.compare_until == cfg.t_end && p.t <= cfg.t_end);
      if (!inside) break;
      const Vec2 q = track_position(*ot, p.t);
      if (is_finite(q)) report.max_discrepancy = std::max(report.max_discrepancy, distance(p.position, q));
    }
  }
  report.within_tolerance = report.max_discrepancy <= report.tolerance;
  return report;
}

// ---------------------------------------------------------------------------------------

RadiusLawConfig radius_law_config(const ExperimentConfig& cfg, double mass_factor) {
  RadiusLawConfig r;
  r.mu = cfg.physics.mu;
  r.chi = cfg.physics.chi;
  r.mass = mass_factor * critical_mass(cfg.physics.mu, cfg.physics.chi);
  r.n_particles = cfg.n_particles;
  r.r0 = cfg.r0;
  r.n_runs = cfg.n_runs;
  r.seed = cfg.seed;
  r.dt = cfg.nbody_dt;
  r.frame_dt = cfg.frame_dt;
  r.t_fit = cfg.fit_t;
  r.stop_radius = cfg.stop_radius;
  r.eps = cfg.eps;
  r.threads = cfg.threads;
  return r;
}

RadialProbeConfig radial_probe_config(const ExperimentConfig& cfg, double probe_factor) {
  RadialProbeConfig r;
  r.mu = cfg.physics.mu;
  r.chi = cfg.physics.chi;
  r.mass = probe_factor * sustaining_mass(cfg.physics.mu, cfg.physics.chi);
  r.k = cfg.physics.k;
  r.r0 = cfg.probe_r0;
  r.t_end = cfg.probe_t;
  r.n_trials = cfg.n_trials;
  r.eps_hit = cfg.eps_hit;
  r.r_max = cfg.r_max;
  r.dt = cfg.probe_dt;
  r.full_k0_drift = cfg.full_k0_drift;
  r.seed = cfg.seed;
  r.threads = cfg.threads;
  return r;
}

HybridVsNBodyConfig hybrid_vs_nbody_config(const ExperimentConfig& cfg) {
  HybridVsNBodyConfig r;
  r.grid = cfg.grid();
  r.physics = cfg.physics;
  r.init = cfg.init;
  r.n_particles = cfg.n_particles;
  r.seed = cfg.seed;
  r.dt = cfg.policy.dt;
  r.t_end = cfg.t_end;
  r.frame_every = cfg.frame_every;
  r.eps = cfg.eps;
  r.r_tolerance = cfg.r_tolerance;
  r.threads = cfg.threads;
  return r;
}

// ---------------------------------------------------------------------------------------

namespace {

void run_hybrid_mode(const ExperimentConfig& cfg, Summary& s) {
  const GridSpec grid = cfg.grid();
  const DetectionParams det = cfg.detection();
  const double max_jump = max_jump_of(cfg);
  SimState state = init_state(grid, cfg.physics, cfg.init, cfg.n_particles, cfg.seed);
  std::vector<AtomTrack> tracks =
      track_atoms({}, detect_atoms(state.ensemble.positions(), state.ensemble.mass_per_particle(), grid, det),
                  state.t, max_jump);
  const auto observer = [&](const SimState& st) {
    if (st.steps % static_cast<std::uint64_t>(cfg.diag_every) != 0) return;
    tracks = track_atoms(std::move(tracks),
                         detect_atoms(st.ensemble.positions(), st.ensemble.mass_per_particle(), grid, det), st.t,
                         max_jump);
  };
  run(state, cfg.physics, cfg.policy, cfg.t_end, cfg.output_policy(), observer, cfg.threads);
  write_tracks_csv(cfg.out_dir / "tracks.csv", tracks);

  const auto atoms = detect_atoms(state.ensemble.positions(), state.ensemble.mass_per_particle(), grid, det);
  double heaviest = 0.0;
  for (const auto& a : atoms) heaviest = std::max(heaviest, a.mass);
  const auto& last = state.diagnostics.back();
  s.notes.push_back("hybrid run finished at t=" + format_double(state.t));
  s.add("t", state.t);
  s.add("steps", std::to_string(state.steps));
  s.add("mass", last.mass);
  s.add("R", last.radius);
  if (last.energy) s.add("E", *last.energy);
  s.add("n_singularities", std::to_string(atoms.size()));
  s.add("max_atom_mass", heaviest);
  s.add("max_C", last.max_c);
  if (cfg.physics.k > 0.0) s.add("uniform_C", cfg.physics.mass / (grid.lx() * grid.ly() * cfg.physics.k * cfg.physics.k));
  s.add("substeps", std::to_string(state.substeps));
  s.add("clamped_particles", std::to_string(state.clamped_particles));
}

void run_nbody_mode(const ExperimentConfig& cfg, Summary& s) {
  NBodyParams p;
  p.kernel = kernel_of(cfg);
  p.mu = cfg.physics.mu;
  p.chi = cfg.physics.chi;
  p.eps = cfg.eps;
  p.coalesce = cfg.coalesce;
  p.r_merge = cfg.r_merge;
  NBodyState state(sample_initial_positions(cfg.init, cfg.grid(), cfg.n_particles, cfg.seed), cfg.physics.mass, p,
                   cfg.seed);
  auto os = open_out(cfg.out_dir / "nbody_radius.csv");
  os << "t,R,n_particles,merges\n";
  const auto row = [&] {
    os << format_double(state.time()) << ',' << format_double(radius(state.positions())) << ',' << state.size()
       << ',' << state.merge_count() << '\n';
  };
  const auto n_steps = static_cast<std::uint64_t>(std::floor(cfg.t_end / cfg.nbody_dt + 1e-9));
  const auto snapshot = [&](std::uint64_t step) {
    if (!cfg.particle_snapshots || cfg.snapshot_every <= 0 || step % static_cast<std::uint64_t>(cfg.snapshot_every)) return;
    char name[32];
    std::snprintf(name, sizeof name, "p_%08llu.bin", static_cast<unsigned long long>(step));
    std::filesystem::create_directories(cfg.out_dir / "snapshots");
    write_particle_snapshot(cfg.out_dir / "snapshots" / name, state.positions(), state.total_mass() / state.initial_count(),
                            state.time());
  };
  row();
  snapshot(0);
  for (std::uint64_t step = 1; step <= n_steps; ++step) {
    nbody_step(state, cfg.nbody_dt, cfg.threads);
    if (step % static_cast<std::uint64_t>(cfg.frame_every) == 0 || step == n_steps) row();
    snapshot(step);
  }
  s.notes.push_back("direct simulation with the " + cfg.kernel + " kernel");
  s.add("t", state.time());
  s.add("R", radius(state.positions()));
  s.add("n_particles", std::to_string(state.size()));
  s.add("merges", std::to_string(state.merge_count()));
  s.add("critical_mass", critical_mass(cfg.physics.mu, cfg.physics.chi));
}

void run_atom_ode_mode(const ExperimentConfig& cfg, Summary& s) {
  AtomOdeOptions opt;
  opt.dt = cfg.ode_dt;
  opt.t_end = cfg.t_end;
  opt.r_merge = cfg.r_merge > 0.0 ? cfg.r_merge : cfg.dx;
  opt.record_every = cfg.frame_every;
  const auto tracks = integrate_atom_ode(initial_atoms(cfg), kernel_of(cfg), cfg.physics.chi, opt);
  write_tracks_csv(cfg.out_dir / "tracks.csv", tracks);
  std::size_t alive = 0;
  for (const auto& tr : tracks) alive += tr.open ? 1 : 0;
  s.notes.push_back("point-atom dynamics integrated with RK4");
  s.add("atoms_initial", std::to_string(tracks.size()));
  s.add("atoms_final", std::to_string(alive));
}

void run_radial_probe_mode(const ExperimentConfig& cfg, Summary& s) {
  auto os = open_out(cfg.out_dir / "radial_probe.csv");
  os << "factor,M,trials,absorbed,absorbed_fraction,stderr,mean_hit_time\n";
  std::vector<RadialProbeResult> results;
  for (double f : cfg.probe_factors) {
    const auto r = radial_probe(radial_probe_config(cfg, f));
    os << format_double(f) << ',' << format_double(r.mass) << ',' << r.trials << ',' << r.absorbed << ','
       << format_double(r.absorbed_fraction) << ',' << format_double(r.stderr_fraction) << ','
       << format_double(r.mean_hit_time) << '\n';
    results.push_back(r);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < results.size(); ++i) {
    const double diff = results[i].absorbed_fraction - results[i - 1].absorbed_fraction;
    const double se = std::hypot(results[i].stderr_fraction, results[i - 1].stderr_fraction);
    if (cfg.probe_factors[i] > cfg.probe_factors[i - 1] ? diff < -3.0 * se : diff > 3.0 * se) monotone = false;
  }
  s.notes.push_back("radial probe; masses are multiples of 4 pi mu / chi");
  s.add("sustaining_mass", sustaining_mass(cfg.physics.mu, cfg.physics.chi));
  for (std::size_t i = 0; i < results.size(); ++i) {
    s.add("absorbed_fraction_" + format_double(cfg.probe_factors[i]), results[i].absorbed_fraction);
  }
  s.add("monotone_3sigma", monotone);
}

void run_radius_law_mode(const ExperimentConfig& cfg, Summary& s) {
  auto series = open_out(cfg.out_dir / "radius_law.csv");
  series << "factor,t,mean_R2\n";
  s.notes.push_back("ensemble radius law of the direct log-kernel system");
  s.add("critical_mass", critical_mass(cfg.physics.mu, cfg.physics.chi));
  for (double f : cfg.mass_factors) {
    const auto r = radius_law_check(radius_law_config(cfg, f));
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      series << format_double(f) << ',' << format_double(r.times[i]) << ',' << format_double(r.mean_r2[i]) << '\n';
    }
    const std::string tag = "_" + format_double(f);
    s.add("predicted_slope" + tag, r.predicted_slope);
    s.add("fitted_slope" + tag, r.fitted_slope);
    s.add("ci_low" + tag, r.ci_low);
    s.add("ci_high" + tag, r.ci_high);
    s.add("relative_error" + tag, r.relative_error);
    if (r.supercritical) {
      s.add("predicted_blowup" + tag, r.predicted_blowup);
      s.add("measured_blowup" + tag, r.measured_blowup);
      s.add("runs_collapsed" + tag, std::to_string(r.runs_collapsed));
      s.add("r2_at_blowup" + tag, r.r2_at_blowup);
    }
  }
}

void run_sweep_mode(const ExperimentConfig& cfg, Summary& s) {
  const auto report = run_critical_mass_sweep(cfg, cfg.out_dir);
  auto os = open_out(cfg.out_dir / "sweep.csv");
  os << "M,seed,classification,final_R,final_atom_mass,persisted_fraction\n";
  for (const auto& r : report.runs) {
    os << format_double(r.mass) << ',' << r.seed << ',' << to_string(r.classification) << ','
       << format_double(r.final_radius) << ',' << format_double(r.final_atom_mass) << ','
       << format_double(r.persisted_fraction) << '\n';
  }
  s.notes.push_back("theoretical reference: M_c/4 = 2 pi mu / chi = " + format_double(report.quarter_mass) +
                    " for a corner trap; the finite domain raises the effective critical mass");
  if (!report.bracket_valid) s.notes.push_back("warning: the initial masses do not bracket the transition");
  if (report.ambiguous) s.notes.push_back("warning: ambiguous classification; bracket left wide");
  s.add("quarter_mass", report.quarter_mass);
  s.add("theta", report.theta);
  s.add("bracket_lo", report.bracket_lo);
  s.add("bracket_hi", report.bracket_hi);
  s.add("bracket_valid", report.bracket_valid);
  s.add("ambiguous", report.ambiguous);
}

void run_merger_mode(const ExperimentConfig& cfg, Summary& s) {
  const auto r = run_merger_compare(cfg, cfg.out_dir);
  write_tracks_csv(cfg.out_dir / "tracks_hybrid.csv", r.hybrid_tracks);
  write_tracks_csv(cfg.out_dir / "tracks_ode.csv", r.ode_tracks);
  s.notes.push_back("hybrid atom tracks against the point-atom ODE");
  s.add("initial_atoms", std::to_string(r.initial_atoms.size()));
  for (const auto& a : r.initial_atoms) s.add("initial_mass_" + std::to_string(a.id), a.mass);
  s.add("merge_time_hybrid", r.merge_time_hybrid);
  s.add("merge_time_ode", r.merge_time_ode);
  s.add("compare_until", r.compare_until);
  s.add("max_discrepancy", r.max_discrepancy);
  s.add("tolerance", r.tolerance);
  s.add("within_tolerance", r.within_tolerance);
}

void run_hybrid_vs_nbody_mode(const ExperimentConfig& cfg, Summary& s) {
  const auto r = hybrid_vs_nbody(hybrid_vs_nbody_config(cfg));
  auto os = open_out(cfg.out_dir / "hybrid_vs_nbody.csv");
  os << "t,R_hybrid,R_nbody\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    os << format_double(r.times[i]) << ',' << format_double(r.r_hybrid[i]) << ',' << format_double(r.r_nbody[i])
       << '\n';
  }
  s.notes.push_back("grid-coupled method against the direct K0 system");
  s.add("max_R_discrepancy", r.max_r_discrepancy);
  s.add("within_tolerance", r.within_tolerance);
  s.add("atoms_hybrid", std::to_string(r.atoms_hybrid.size()));
  s.add("atoms_nbody", std::to_string(r.atoms_nbody.size()));
}

}  // namespace

Summary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Summary s;
  const std::string hash = write_provenance(cfg.out_dir, cfg);
  s.add("mode", to_string(cfg.mode));
  s.add("seed", std::to_string(cfg.seed));
  s.add("config_hash", hash);
  switch (cfg.mode) {
    case Mode::hybrid: run_hybrid_mode(cfg, s); break;
    case Mode::nbody: run_nbody_mode(cfg, s); break;
    case Mode::atom_ode: run_atom_ode_mode(cfg, s); break;
    case Mode::radial_probe: run_radial_probe_mode(cfg, s); break;
    case Mode::radius_law: run_radius_law_mode(cfg, s); break;
    case Mode::critical_mass_sweep: run_sweep_mode(cfg, s); break;
    case Mode::merger_compare: run_merger_mode(cfg, s); break;
    case Mode::hybrid_vs_nbody: run_hybrid_vs_nbody_mode(cfg, s); break;
  }
  auto os = open_out(cfg.out_dir / "summary.txt");
  os << s.text();
  return s;
}

}  // namespace kspic
