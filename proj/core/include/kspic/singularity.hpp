#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "kspic/green.hpp"
#include "kspic/grid.hpp"
#include "kspic/vec2.hpp"

namespace kspic {

struct Atom {
  int id = -1;
  Vec2 position;
  double mass = 0.0;
  double birth_time = 0.0;
  bool alive = true;
};

struct DetectionParams {
  /// Minimum particle mass of a reported atom.
  double theta_mass = 0.0;
  /// Particles within this distance of a candidate's node centroid belong to the atom.
  double r_cluster = 0.0;
};

/// Default detection for the given physics: theta = 2 pi mu / chi (half the sustaining mass
/// 4 pi mu / chi), r_cluster = 3 dx.
DetectionParams default_detection(double mu, double chi, double dx);

/// Finds particle aggregates. Candidate nodes carry deposited nodal mass >= theta/4 (a point
/// mass always leaves at least a quarter of itself on one corner of its cell); candidates are
/// grouped by 8-neighbour connectivity, each group's particles within r_cluster of the group's
/// nodal centroid are collected (nearest group wins), and groups whose collected mass reaches
/// theta become atoms located at the collected particles' centroid. Atoms are ordered by the
/// row-major position of their first candidate node.
std::vector<Atom> detect_atoms(std::span<const Vec2> positions, double mass_per_particle, const GridSpec& spec,
                               const DetectionParams& params);

struct TrackPoint {
  double t = 0.0;
  Vec2 position;
  double mass = 0.0;
};

struct AtomTrack {
  int id = -1;
  std::vector<TrackPoint> points;
  /// Ids of tracks that merged into this one.
  std::vector<int> parent_ids;
  bool open = true;
};

/// Greedy nearest-neighbour association of this frame's atoms to the open tracks (closest
/// pairs first, within max_jump). Unmatched atoms open new tracks; unmatched tracks close, and
/// if a continuing track now sits within max_jump of a closed track's last position the
/// closure is recorded as a merge into it. Frame times must increase.
std::vector<AtomTrack> track_atoms(std::vector<AtomTrack> tracks, const std::vector<Atom>& current, double t,
                                   double max_jump);

struct AtomOdeOptions {
  double dt = 1e-3;
  double t_end = 1.0;
  /// Atoms closer than this coalesce (masses add, mass-weighted position).
  double r_merge = 0.05;
  /// Record a track point every this many steps (the final state is always recorded).
  int record_every = 1;
};

/// RK4 integration of point-singularity dynamics
///   dx_i/dt = -chi sum_{j != i} m_j grad_x V(x_i, x_j)
/// with coalescence. Free-space planar kernels only.
std::vector<AtomTrack> integrate_atom_ode(const std::vector<Atom>& atoms, const Kernel& kernel, double chi,
                                          const AtomOdeOptions& options);

/// Columns: id,t,x,y,mass,parent_ids (parent ids separated by ';').
void write_tracks_csv(const std::filesystem::path& path, const std::vector<AtomTrack>& tracks);

}  // namespace kspic
