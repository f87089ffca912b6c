#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kspic/error.hpp"
#include "kspic/provenance.hpp"
#include "kspic/snapshot_io.hpp"

using namespace kspic;

namespace {
std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("kspic_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}
}  // namespace

TEST(Snapshot, GridRoundTrip) {
  const auto dir = scratch("grid");
  const GridSpec g{5, 3, 0.25};
  GridField f(g);
  for (std::size_t n = 0; n < g.size(); ++n) f.values()[n] = std::sqrt(2.0) * n - 1.0 / 3.0;
  write_grid_snapshot(dir / "c.bin", f, 1.5);
  EXPECT_EQ(std::filesystem::file_size(dir / "c.bin"), 6 + 4 + 4 + 8 + 8 + 8 * g.size());
  const auto back = read_grid_snapshot(dir / "c.bin");
  EXPECT_EQ(back.t, 1.5);
  EXPECT_TRUE(back.field.spec() == g);
  for (std::size_t n = 0; n < g.size(); ++n) EXPECT_EQ(back.field.values()[n], f.values()[n]);
}

TEST(Snapshot, ParticleRoundTripAndBadMagic) {
  const auto dir = scratch("part");
  const std::vector<Vec2> pos{{0.1, 0.2}, {1.0 / 3.0, 2.0 / 7.0}};
  write_particle_snapshot(dir / "p.bin", pos, 0.125, 2.0);
  const auto back = read_particle_snapshot(dir / "p.bin");
  EXPECT_EQ(back.mass_per_particle, 0.125);
  EXPECT_EQ(back.t, 2.0);
  ASSERT_EQ(back.positions.size(), 2u);
  EXPECT_EQ(back.positions[1].x, pos[1].x);
  EXPECT_EQ(back.positions[1].y, pos[1].y);
  EXPECT_THROW(read_grid_snapshot(dir / "p.bin"), NumericalError);
  EXPECT_THROW(read_particle_snapshot(dir / "missing.bin"), NumericalError);
}

TEST(Snapshot, CsvAndNumberFormat) {
  const auto dir = scratch("csv");
  GridField f(GridSpec{3, 3, 0.5}, 0.1);
  write_grid_csv(dir / "c.csv", f);
  std::ifstream is(dir / "c.csv");
  std::string header, first;
  std::getline(is, header);
  std::getline(is, first);
  EXPECT_EQ(header, "x,y,value");
  EXPECT_EQ(first, "0,0,0.1");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Provenance, GitBlobHash) {
  EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}
