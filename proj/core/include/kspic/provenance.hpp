#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "kspic/config.hpp"

namespace kspic {

/// SHA-1 of "blob <size>\0" + content, hex encoded (what `git hash-object` prints).
std::string git_blob_hash(std::string_view content);

/// Writes config.txt (resolved config) and provenance.txt (mode, seed, config hash, preset
/// assumptions, library version) into dir. Returns the config hash.
std::string write_provenance(const std::filesystem::path& dir, const ExperimentConfig& cfg);

}  // namespace kspic
