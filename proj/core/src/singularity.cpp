#include "kspic/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <tuple>

#include "kspic/error.hpp"
#include "kspic/particles.hpp"
#include "kspic/snapshot_io.hpp"

namespace kspic {

DetectionParams default_detection(double mu, double chi, double dx) {
  const double theta = chi > 0.0 ? 2.0 * std::numbers::pi * mu / chi : std::numeric_limits<double>::infinity();
  return {theta, 3.0 * dx};
}

std::vector<Atom> detect_atoms(std::span<const Vec2> positions, double mass_per_particle, const GridSpec& spec,
                               const DetectionParams& params) {
  if (!(params.theta_mass > 0.0)) throw NumericalError("detect_atoms: theta_mass must be positive");
  if (positions.empty()) return {};
  const GridField nodal = deposit_nodal_mass(positions, mass_per_particle, spec);
  const double node_threshold = 0.25 * params.theta_mass;

  std::vector<int> label(spec.size(), -1);
  std::vector<Vec2> centroids;
  std::vector<int> stack;
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) {
      const std::size_t seed = spec.index(i, j);
      if (label[seed] >= 0 || nodal(i, j) < node_threshold) continue;
      const int id = static_cast<int>(centroids.size());
      double m = 0.0;
      Vec2 mx;
      label[seed] = id;
      stack.assign(1, static_cast<int>(seed));
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int ci = idx % spec.nx;
        const int cj = idx / spec.nx;
        m += nodal(ci, cj);
        mx += nodal(ci, cj) * spec.node(ci, cj);
        for (int dj = -1; dj <= 1; ++dj) {
          for (int di = -1; di <= 1; ++di) {
            const int ni = ci + di;
            const int nj = cj + dj;
            if (ni < 0 || nj < 0 || ni >= spec.nx || nj >= spec.ny) continue;
            const std::size_t nidx = spec.index(ni, nj);
            if (label[nidx] >= 0 || nodal(ni, nj) < node_threshold) continue;
            label[nidx] = id;
            stack.push_back(static_cast<int>(nidx));
          }
        }
      }
      centroids.push_back((1.0 / m) * mx);
    }
  }
  if (centroids.empty()) return {};

  std::vector<double> mass(centroids.size(), 0.0);
  std::vector<Vec2> moment(centroids.size());
  const double r2 = params.r_cluster * params.r_cluster;
  for (const auto& p : positions) {
    int best = -1;
    double best_d2 = r2;
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const double d2 = norm2(p - centroids[c]);
      if (d2 <= best_d2) {
        best_d2 = d2;
        best = static_cast<int>(c);
      }
    }
    if (best >= 0) {
      mass[static_cast<std::size_t>(best)] += mass_per_particle;
      moment[static_cast<std::size_t>(best)] += mass_per_particle * p;
    }
  }

  std::vector<Atom> atoms;
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (mass[c] < params.theta_mass) continue;
    Atom a;
    a.id = static_cast<int>(atoms.size());
    a.mass = mass[c];
    a.position = (1.0 / mass[c]) * moment[c];
    atoms.push_back(a);
  }
  return atoms;
}

std::vector<AtomTrack> track_atoms(std::vector<AtomTrack> tracks, const std::vector<Atom>& current, double t,
                                   double max_jump) {
  int next_id = 0;
  for (const auto& tr : tracks) {
    next_id = std::max(next_id, tr.id + 1);
    if (tr.open && !tr.points.empty() && !(t > tr.points.back().t)) {
      throw NumericalError("track_atoms: frame times must be strictly increasing");
    }
  }

  std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
  for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
    if (!tracks[ti].open || tracks[ti].points.empty()) continue;
    for (std::size_t ai = 0; ai < current.size(); ++ai) {
      const double d = distance(tracks[ti].points.back().position, current[ai].position);
      if (d <= max_jump) candidates.emplace_back(d, ti, ai);
    }
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<bool> track_matched(tracks.size(), false);
  std::vector<bool> atom_matched(current.size(), false);
  for (const auto& [d, ti, ai] : candidates) {
    if (track_matched[ti] || atom_matched[ai]) continue;
    track_matched[ti] = true;
    atom_matched[ai] = true;
    tracks[ti].points.push_back({t, current[ai].position, current[ai].mass});
  }

  for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
    auto& tr = tracks[ti];
    if (!tr.open || track_matched[ti]) continue;
    tr.open = false;
    const Vec2 last = tr.points.empty() ? Vec2{} : tr.points.back().position;
    double best = max_jump;
    int survivor = -1;
    for (std::size_t si = 0; si < tracks.size(); ++si) {
      if (!track_matched[si]) continue;
      const double d = distance(tracks[si].points.back().position, last);
      if (d <= best) {
        best = d;
        survivor = static_cast<int>(si);
      }
    }
    if (survivor >= 0) tracks[static_cast<std::size_t>(survivor)].parent_ids.push_back(tr.id);
  }

  for (std::size_t ai = 0; ai < current.size(); ++ai) {
    if (atom_matched[ai]) continue;
    AtomTrack tr;
    tr.id = next_id++;
    tr.points.push_back({t, current[ai].position, current[ai].mass});
    tracks.push_back(std::move(tr));
  }
  return tracks;
}

namespace {

struct OdeBody {
  int track;  // index into the output track list
  Vec2 x;
  double m;
};

void ode_velocity(const std::vector<OdeBody>& bodies, std::span<const Vec2> x, const Kernel& kernel, double chi,
                  std::span<Vec2> v) {
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    Vec2 acc;
    for (std::size_t j = 0; j < bodies.size(); ++j) {
      if (i != j) acc += bodies[j].m * kernel.gradient(x[i], x[j]);
    }
    v[i] = -chi * acc;
  }
}

}  // namespace

std::vector<AtomTrack> integrate_atom_ode(const std::vector<Atom>& atoms, const Kernel& kernel, double chi,
                                          const AtomOdeOptions& options) {
  if (atoms.empty()) throw NumericalError("atom ode: need at least one atom");
  if (kernel.form() != KernelForm::log2d && kernel.form() != KernelForm::bessel2d) {
    throw NumericalError("atom ode: only planar free-space kernels are supported");
  }
  if (!(options.dt > 0.0) || options.record_every < 1) throw NumericalError("atom ode: bad step options");

  std::vector<AtomTrack> tracks;
  std::vector<OdeBody> bodies;
  for (const auto& a : atoms) {
    if (!(a.mass > 0.0)) throw NumericalError("atom ode: atom masses must be positive");
    AtomTrack tr;
    tr.id = a.id >= 0 ? a.id : static_cast<int>(tracks.size());
    tr.points.push_back({0.0, a.position, a.mass});
    bodies.push_back({static_cast<int>(tracks.size()), a.position, a.mass});
    tracks.push_back(std::move(tr));
  }

  const auto record_all = [&](double t) {
    for (const auto& b : bodies) {
      auto& pts = tracks[static_cast<std::size_t>(b.track)].points;
      if (!pts.empty() && pts.back().t == t) {
        pts.back() = {t, b.x, b.m};
      } else {
        pts.push_back({t, b.x, b.m});
      }
    }
  };
  const auto merge_close = [&]() {
    bool any = false;
    bool merged = true;
    while (merged) {
      merged = false;
      for (std::size_t i = 0; i < bodies.size() && !merged; ++i) {
        for (std::size_t j = i + 1; j < bodies.size() && !merged; ++j) {
          if (distance(bodies[i].x, bodies[j].x) >= options.r_merge) continue;
          const std::size_t keep = bodies[i].m >= bodies[j].m ? i : j;
          const std::size_t drop = keep == i ? j : i;
          const double m = bodies[keep].m + bodies[drop].m;
          bodies[keep].x = (1.0 / m) * (bodies[keep].m * bodies[keep].x + bodies[drop].m * bodies[drop].x);
          bodies[keep].m = m;
          auto& dropped = tracks[static_cast<std::size_t>(bodies[drop].track)];
          tracks[static_cast<std::size_t>(bodies[keep].track)].parent_ids.push_back(dropped.id);
          dropped.open = false;
          bodies.erase(bodies.begin() + static_cast<std::ptrdiff_t>(drop));
          merged = true;
          any = true;
        }
      }
    }
    return any;
  };
  if (merge_close()) record_all(0.0);

  const auto n_steps = static_cast<long long>(std::ceil(options.t_end / options.dt - 1e-9));
  std::vector<Vec2> x0, k1, k2, k3, k4, tmp;
  for (long long step = 1; step <= n_steps; ++step) {
    const double t_prev = (step - 1) * options.dt;
    const double h = std::min(options.dt, options.t_end - t_prev);
    const std::size_t n = bodies.size();
    if (n > 1) {
      x0.resize(n);
      k1.resize(n);
      k2.resize(n);
      k3.resize(n);
      k4.resize(n);
      tmp.resize(n);
      for (std::size_t i = 0; i < n; ++i) x0[i] = bodies[i].x;
      ode_velocity(bodies, x0, kernel, chi, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x0[i] + 0.5 * h * k1[i];
      ode_velocity(bodies, tmp, kernel, chi, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x0[i] + 0.5 * h * k2[i];
      ode_velocity(bodies, tmp, kernel, chi, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x0[i] + h * k3[i];
      ode_velocity(bodies, tmp, kernel, chi, k4);
      for (std::size_t i = 0; i < n; ++i) {
        bodies[i].x = x0[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
    }
    const double t = (step == n_steps) ? options.t_end : step * options.dt;
    const bool merged = merge_close();
    if (merged || step % options.record_every == 0 || step == n_steps) record_all(t);
  }
  return tracks;
}

void write_tracks_csv(const std::filesystem::path& path, const std::vector<AtomTrack>& tracks) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw NumericalError("cannot open " + path.string());
  os << "id,t,x,y,mass,parent_ids\n";
  for (const auto& tr : tracks) {
    std::string parents;
    for (std::size_t k = 0; k < tr.parent_ids.size(); ++k) {
      if (k > 0) parents += ';';
      parents += std::to_string(tr.parent_ids[k]);
    }
    for (const auto& p : tr.points) {
      os << tr.id << ',' << format_double(p.t) << ',' << format_double(p.position.x) << ','
         << format_double(p.position.y) << ',' << format_double(p.mass) << ',' << parents << '\n';
    }
  }
}

}  // namespace kspic
