#include "kspic/hybrid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "kspic/error.hpp"
#include "kspic/implicit_solver.hpp"
#include "kspic/rng.hpp"
#include "kspic/snapshot_io.hpp"

namespace kspic {

void PhysicsParams::validate() const {
  if (alpha != 0 && alpha != 1) throw NumericalError("physics: alpha must be 0 or 1");
  if (!(mu > 0.0)) throw NumericalError("physics: mu must be positive");
  if (!(chi >= 0.0)) throw NumericalError("physics: chi must be non-negative");
  if (!(k >= 0.0)) throw NumericalError("physics: k must be non-negative");
  if (!(mass > 0.0)) throw NumericalError("physics: total mass must be positive");
  if (alpha == 0 && k == 0.0) throw NumericalError("physics: alpha = 0 requires k > 0");
}

namespace {

double folded_half_normal(StreamRng& rng, double sigma, double length) {
  std::normal_distribution<double> normal(0.0, sigma);
  for (;;) {
    const double v = std::abs(normal(rng));
    if (v <= length) return v;
  }
}

Vec2 truncated_gaussian(StreamRng& rng, const Vec2& center, double sigma, const GridSpec& grid) {
  std::normal_distribution<double> normal(0.0, sigma);
  for (;;) {
    const Vec2 p{center.x + normal(rng), center.y + normal(rng)};
    if (grid.contains(p)) return p;
  }
}

}  // namespace

std::vector<Vec2> sample_initial_positions(const InitialCondition& ic, const GridSpec& grid, std::size_t n,
                                           std::uint64_t seed) {
  if (n == 0) throw NumericalError("init: need at least one particle");
  std::vector<Vec2> pos(n);
  const auto uniform_point = [&](StreamRng& rng) { return Vec2{rng.uniform() * grid.lx(), rng.uniform() * grid.ly()}; };

  switch (ic.kind) {
    case InitialCondition::Kind::uniform:
      for (std::size_t i = 0; i < n; ++i) {
        StreamRng rng(seed, i, kInitStream);
        pos[i] = uniform_point(rng);
      }
      break;
    case InitialCondition::Kind::corner: {
      if (!(ic.corner_fraction >= 0.0 && ic.corner_fraction <= 1.0) || !(ic.corner_sigma > 0.0)) {
        throw NumericalError("init: corner fraction must lie in [0,1] and sigma be positive");
      }
      const auto n_corner = static_cast<std::size_t>(std::llround(ic.corner_fraction * static_cast<double>(n)));
      for (std::size_t i = 0; i < n; ++i) {
        StreamRng rng(seed, i, kInitStream);
        pos[i] = i < n_corner ? Vec2{folded_half_normal(rng, ic.corner_sigma, grid.lx()),
                                     folded_half_normal(rng, ic.corner_sigma, grid.ly())}
                              : uniform_point(rng);
      }
      break;
    }
    case InitialCondition::Kind::clusters:
    case InitialCondition::Kind::atomic: {
      if (ic.clusters.empty()) throw NumericalError("init: cluster list is empty");
      double total = 0.0;
      for (const auto& c : ic.clusters) {
        if (!grid.contains(c.center)) throw NumericalError("init: cluster centre outside the domain");
        if (!(c.fraction > 0.0)) throw NumericalError("init: cluster mass fractions must be positive");
        total += c.fraction;
      }
      const bool atomic = ic.kind == InitialCondition::Kind::atomic;
      std::size_t i = 0;
      double cumulative = 0.0;
      for (std::size_t c = 0; c < ic.clusters.size(); ++c) {
        cumulative += ic.clusters[c].fraction / total;
        const std::size_t stop = c + 1 == ic.clusters.size()
                                     ? n
                                     : std::min(n, static_cast<std::size_t>(std::llround(cumulative * static_cast<double>(n))));
        for (; i < stop; ++i) {
          if (atomic || ic.clusters[c].sigma <= 0.0) {
            pos[i] = ic.clusters[c].center;
          } else {
            StreamRng rng(seed, i, kInitStream);
            pos[i] = truncated_gaussian(rng, ic.clusters[c].center, ic.clusters[c].sigma, grid);
          }
        }
      }
      break;
    }
    case InitialCondition::Kind::random_clusters: {
      if (ic.random_count < 1 || !(ic.random_sigma > 0.0) || !(ic.random_fraction >= 0.0 && ic.random_fraction <= 1.0)) {
        throw NumericalError("init: random clusters need count >= 1, sigma > 0 and a fraction in [0,1]");
      }
      std::vector<Vec2> centers(static_cast<std::size_t>(ic.random_count));
      for (std::size_t c = 0; c < centers.size(); ++c) {
        StreamRng rng(seed, c, kInitStream - 1);
        centers[c] = uniform_point(rng);
      }
      const auto n_clustered = static_cast<std::size_t>(std::llround(ic.random_fraction * static_cast<double>(n)));
      for (std::size_t i = 0; i < n; ++i) {
        StreamRng rng(seed, i, kInitStream);
        pos[i] = i < n_clustered ? truncated_gaussian(rng, centers[i * centers.size() / n_clustered], ic.random_sigma, grid)
                                 : uniform_point(rng);
      }
      break;
    }
  }
  return pos;
}

SimState init_state(const GridSpec& grid, const PhysicsParams& physics, const InitialCondition& ic,
                    std::size_t n_particles, std::uint64_t seed) {
  physics.validate();
  grid.validate();
  SimState state{0.0, ParticleEnsemble(sample_initial_positions(ic, grid, n_particles, seed), physics.mass, seed),
                 GridField(grid), {}, 0, 0, 0};
  if (physics.elliptic()) {
    const ImplicitSolver solver(grid, 0, physics.k, 1.0);
    state.c = solver.solve_elliptic(deposit(state.ensemble, grid));
  } else {
    auto values = state.c.values();
    for (std::size_t n = 0; n < values.size(); ++n) {
      values[n] = ic.c0;
      if (ic.c0_noise != 0.0) {
        StreamRng rng(seed ^ 0x5eedc0ffeeULL, n, kInitStream);
        values[n] += ic.c0_noise * (2.0 * rng.uniform() - 1.0);
      }
    }
  }
  return state;
}

double radius(std::span<const Vec2> positions) {
  if (positions.empty()) return 0.0;
  const double n = static_cast<double>(positions.size());
  Vec2 mean;
  for (const auto& p : positions) mean += p;
  mean *= 1.0 / n;
  double sum = 0.0;
  for (const auto& p : positions) sum += norm2(p - mean);
  return std::sqrt(sum / n);
}

double energy(const GridField& p, const GridField& c, double mu, double chi) {
  if (!(p.spec() == c.spec())) throw NumericalError("energy: field specs differ");
  const auto& spec = p.spec();
  double entropy = 0.0;
  double interaction = 0.0;
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) {
      const double w = spec.weight(i, j);
      const double rho = p(i, j);
      if (rho > 0.0) entropy += w * rho * std::log(rho);
      interaction += w * rho * c(i, j);
    }
  }
  const double area = spec.dx * spec.dx;
  return mu * entropy * area - 0.5 * chi * interaction * area;
}

double energy(const SimState& state, const PhysicsParams& physics) {
  if (!physics.elliptic()) throw NumericalError("energy defined for elliptic model");
  return energy(deposit(state.ensemble, state.c.spec()), state.c, physics.mu, physics.chi);
}

DiagnosticsRow compute_diagnostics(const SimState& state, const PhysicsParams& physics,
                                   const DetectionParams& detection) {
  DiagnosticsRow row;
  row.t = state.t;
  row.mass = state.ensemble.mass_per_particle() * static_cast<double>(state.ensemble.size());
  row.radius = radius(state.ensemble.positions());
  if (physics.elliptic()) row.energy = energy(state, physics);
  if (detection.theta_mass > 0.0 && std::isfinite(detection.theta_mass)) {
    row.n_singularities = static_cast<int>(
        detect_atoms(state.ensemble.positions(), state.ensemble.mass_per_particle(), state.c.spec(), detection).size());
  }
  row.max_c = state.c.max();
  return row;
}

void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticsRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw NumericalError("cannot open " + path.string());
  os << "t,mass,R,E,n_singularities,max_C\n";
  for (const auto& r : rows) {
    os << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.radius) << ','
       << (r.energy ? format_double(*r.energy) : std::string()) << ',' << r.n_singularities << ','
       << format_double(r.max_c) << '\n';
  }
}

namespace {

void write_snapshots(const SimState& state, const PhysicsParams& physics, const OutputPolicy& output) {
  const auto& spec = state.c.spec();
  GridField c = state.c;
  if (output.subtract_mean_field && physics.k > 0.0) {
    const double shift = physics.mass / (physics.k * physics.k * spec.lx() * spec.ly());
    for (auto& v : c.values()) v -= shift;
  }
  char name[64];
  std::snprintf(name, sizeof name, "%08llu", static_cast<unsigned long long>(state.steps));
  const auto dir = output.dir / "snapshots";
  write_grid_snapshot(dir / (std::string("c_") + name + ".bin"), c, state.t);
  if (output.snapshot_csv) write_grid_csv(dir / (std::string("c_") + name + ".csv"), c);
  if (output.particle_snapshots) {
    write_particle_snapshot(dir / (std::string("p_") + name + ".bin"), state.ensemble.positions(),
                            state.ensemble.mass_per_particle(), state.t);
    if (output.snapshot_csv) write_particle_csv(dir / (std::string("p_") + name + ".csv"), state.ensemble.positions());
  }
}

}  // namespace

void run(SimState& state, const PhysicsParams& physics, const StepPolicy& policy, double t_end,
         const OutputPolicy& output, const StepObserver& observer, int threads) {
  physics.validate();
  policy.validate();
  if (output.diag_every < 1 || output.snapshot_every < 0) throw NumericalError("output: bad cadence");
  const GridSpec spec = state.c.spec();
  const ImplicitSolver solver(spec, physics.alpha, physics.k, policy.dt);
  const bool to_disk = !output.dir.empty();
  const auto flush = [&] {
    if (to_disk) write_diagnostics_csv(output.dir / "diagnostics.csv", state.diagnostics);
  };

  const double t0 = state.t;
  const auto n_steps = static_cast<std::uint64_t>(std::max(0.0, std::floor((t_end - t0) / policy.dt + 1e-9)));
  const std::uint64_t first_step = state.steps;
  try {
    if (state.diagnostics.empty() || state.diagnostics.back().t < state.t) {
      state.diagnostics.push_back(compute_diagnostics(state, physics, output.detection));
    }
    if (to_disk && output.snapshot_every > 0 && state.steps % static_cast<std::uint64_t>(output.snapshot_every) == 0) {
      write_snapshots(state, physics, output);
    }
    for (std::uint64_t s = 1; s <= n_steps; ++s) {
      if (physics.elliptic()) {
        // state.c already holds the solve for the current positions.
        const auto [cx, cy] = build_gradient(state.c);
        const auto stats = advance_particles(state.ensemble, cx, cy, physics.mu, physics.chi, policy, threads);
        state.substeps += stats.substeps;
        state.clamped_particles += stats.clamped_particles;
        state.c = solver.solve_elliptic(deposit(state.ensemble, spec));
      } else {
        const GridField p = deposit(state.ensemble, spec);
        state.c = solver.step(state.c, p);
        const auto [cx, cy] = build_gradient(state.c);
        const auto stats = advance_particles(state.ensemble, cx, cy, physics.mu, physics.chi, policy, threads);
        state.substeps += stats.substeps;
        state.clamped_particles += stats.clamped_particles;
      }
      ++state.steps;
      state.t = t0 + static_cast<double>(s) * policy.dt;
      const std::uint64_t done = state.steps - first_step;
      if (done % static_cast<std::uint64_t>(output.diag_every) == 0 || s == n_steps) {
        state.diagnostics.push_back(compute_diagnostics(state, physics, output.detection));
      }
      if (to_disk && output.snapshot_every > 0 && state.steps % static_cast<std::uint64_t>(output.snapshot_every) == 0) {
        write_snapshots(state, physics, output);
      }
      if (observer) observer(state);
    }
  } catch (...) {
    flush();
    throw;
  }
  flush();
}

}  // namespace kspic
