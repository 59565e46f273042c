#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adlforge/app/config.hpp"

namespace adlforge::app {

inline constexpr const char* kProvenanceFile = "provenance.json";
std::string_view tool_version();

struct Provenance {
  std::string stage;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::string prompts_version;
  std::string vocab_version;
  /// Path (relative to the artifact directory when possible) -> SHA-256.
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
};

/// Hashes `files` into a path -> digest map keyed relative to `base`.
/// Directories are expanded recursively.
std::map<std::string, std::string> hash_files(const std::vector<std::filesystem::path>& files,
                                              const std::filesystem::path& base);

Provenance make_provenance(const std::string& stage, const RunConfig& config);

/// Writes `<dir>/provenance.json`, hashing every other file under `dir` as
/// an output.
void write_provenance(const std::filesystem::path& dir, Provenance p);
Provenance read_provenance(const std::filesystem::path& dir);
nlohmann::json to_json(const Provenance& p);

/// `base` if it does not exist (or `overwrite`), else the first free
/// `base-vN` with N >= 2. With `overwrite`, an existing `base` is cleared.
std::filesystem::path versioned_output(const std::filesystem::path& base, bool overwrite);

}  // namespace adlforge::app
