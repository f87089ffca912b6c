#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kspic/grid.hpp"
#include "kspic/vec2.hpp"

namespace kspic {

// Binary layouts (all little-endian):
//   grid:      "KSPIC1" u32 nx u32 ny f64 dx f64 t, then nx*ny f64 (row-major, x fastest)
//   particles: "KSPTC1" u64 N f64 mass_per_particle f64 t, then N (x, y) f64 pairs

void write_grid_snapshot(const std::filesystem::path& path, const GridField& field, double t);
void write_grid_csv(const std::filesystem::path& path, const GridField& field);

struct GridSnapshot {
  GridField field;
  double t = 0.0;
};
GridSnapshot read_grid_snapshot(const std::filesystem::path& path);

void write_particle_snapshot(const std::filesystem::path& path, std::span<const Vec2> positions,
                             double mass_per_particle, double t);
void write_particle_csv(const std::filesystem::path& path, std::span<const Vec2> positions);

struct ParticleSnapshot {
  std::vector<Vec2> positions;
  double mass_per_particle = 0.0;
  double t = 0.0;
};
ParticleSnapshot read_particle_snapshot(const std::filesystem::path& path);

/// Shortest round-trip decimal text for a double; CSV writers use it so outputs are
/// bit-reproducible.
std::string format_double(double v);

}  // namespace kspic
