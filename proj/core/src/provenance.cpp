#include "kspic/provenance.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <span>

#include "kspic/error.hpp"

namespace kspic {

std::string git_blob_hash(std::string_view content) {
  std::string blob = "blob " + std::to_string(content.size());
  blob += '\0';
  blob += content;
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), md.data(), &len, EVP_sha1(), nullptr) != 1) {
    throw NumericalError("sha1 failed");
  }
  const std::span<const unsigned char> digest(md.data(), len);
  std::string hex;
  hex.reserve(2 * digest.size());
  for (unsigned char b : digest) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", b);
    hex += buf;
  }
  return hex;
}

std::string write_provenance(const std::filesystem::path& dir, const ExperimentConfig& cfg) {
  std::filesystem::create_directories(dir);
  const std::string text = to_config_text(cfg);
  const std::string hash = git_blob_hash(text);
  {
    std::ofstream os(dir / "config.txt", std::ios::binary);
    os << text;
    if (!os) throw NumericalError("cannot write " + (dir / "config.txt").string());
  }
  std::ofstream os(dir / "provenance.txt", std::ios::binary);
  os << "mode=" << to_string(cfg.mode) << '\n';
  os << "seed=" << cfg.seed << '\n';
  os << "threads=" << cfg.threads << '\n';
  os << "config_hash=" << hash << '\n';
  os << "preset=" << cfg.preset << '\n';
  for (const auto& a : preset_assumptions(cfg.preset)) os << "assumption=" << a << '\n';
  os << "version=" << KSPIC_VERSION << '\n';
  if (!os) throw NumericalError("cannot write " + (dir / "provenance.txt").string());
  return hash;
}

}  // namespace kspic
