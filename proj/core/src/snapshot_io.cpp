#include "kspic/snapshot_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>

#include "kspic/error.hpp"

namespace kspic {
namespace {

constexpr std::array<char, 6> kGridMagic{'K', 'S', 'P', 'I', 'C', '1'};
constexpr std::array<char, 6> kParticleMagic{'K', 'S', 'P', 'T', 'C', '1'};

template <class UInt>
void put_le(std::ostream& os, UInt v) {
  std::array<char, sizeof(UInt)> bytes{};
  for (std::size_t b = 0; b < sizeof(UInt); ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xFF);
  os.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }

template <class UInt>
UInt get_le(std::istream& is) {
  std::array<unsigned char, sizeof(UInt)> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!is) throw NumericalError("snapshot: truncated file");
  UInt v = 0;
  for (std::size_t b = 0; b < sizeof(UInt); ++b) v |= static_cast<UInt>(bytes[b]) << (8 * b);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw NumericalError("cannot open " + path.string() + " for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path, const std::array<char, 6>& magic) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw NumericalError("cannot open " + path.string());
  std::array<char, 6> got{};
  is.read(got.data(), got.size());
  if (!is || got != magic) throw NumericalError(path.string() + ": bad magic");
  return is;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_grid_snapshot(const std::filesystem::path& path, const GridField& field, double t) {
  auto os = open_out(path, true);
  const auto& spec = field.spec();
  os.write(kGridMagic.data(), kGridMagic.size());
  put_le(os, static_cast<std::uint32_t>(spec.nx));
  put_le(os, static_cast<std::uint32_t>(spec.ny));
  put_f64(os, spec.dx);
  put_f64(os, t);
  for (double v : field.values()) put_f64(os, v);
}

void write_grid_csv(const std::filesystem::path& path, const GridField& field) {
  auto os = open_out(path, false);
  const auto& spec = field.spec();
  os << "x,y,value\n";
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) {
      const Vec2 p = spec.node(i, j);
      os << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(field(i, j)) << '\n';
    }
  }
}

GridSnapshot read_grid_snapshot(const std::filesystem::path& path) {
  auto is = open_in(path, kGridMagic);
  GridSpec spec;
  spec.nx = static_cast<int>(get_le<std::uint32_t>(is));
  spec.ny = static_cast<int>(get_le<std::uint32_t>(is));
  spec.dx = get_f64(is);
  const double t = get_f64(is);
  std::vector<double> values(spec.size());
  for (auto& v : values) v = get_f64(is);
  return {GridField(spec, std::move(values)), t};
}

void write_particle_snapshot(const std::filesystem::path& path, std::span<const Vec2> positions,
                             double mass_per_particle, double t) {
  auto os = open_out(path, true);
  os.write(kParticleMagic.data(), kParticleMagic.size());
  put_le(os, static_cast<std::uint64_t>(positions.size()));
  put_f64(os, mass_per_particle);
  put_f64(os, t);
  for (const auto& p : positions) {
    put_f64(os, p.x);
    put_f64(os, p.y);
  }
}

void write_particle_csv(const std::filesystem::path& path, std::span<const Vec2> positions) {
  auto os = open_out(path, false);
  os << "x,y\n";
  for (const auto& p : positions) os << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

ParticleSnapshot read_particle_snapshot(const std::filesystem::path& path) {
  auto is = open_in(path, kParticleMagic);
  ParticleSnapshot snap;
  const auto n = get_le<std::uint64_t>(is);
  snap.mass_per_particle = get_f64(is);
  snap.t = get_f64(is);
  snap.positions.resize(n);
  for (auto& p : snap.positions) {
    p.x = get_f64(is);
    p.y = get_f64(is);
  }
  return snap;
}

}  // namespace kspic
