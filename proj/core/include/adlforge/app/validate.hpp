#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "adlforge/curation/codec.hpp"

namespace adlforge::app {

struct ValidationReport {
  std::vector<std::string> checked;  // files inspected
  std::vector<std::string> errors;   // one line per violation, file first

  bool ok() const { return errors.empty(); }
};

/// Checks every recognized artifact under `path` (a file or a directory):
/// manifest schemas and invariants, stitched tiling and media, QA counts,
/// MCQ items, track sets, feature pairs and provenance hashes. `codec`
/// enables media frame-count checks.
ValidationReport validate_path(const std::filesystem::path& path, curation::VideoCodec* codec = nullptr);

}  // namespace adlforge::app
