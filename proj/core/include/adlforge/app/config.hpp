#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adlforge/backends/request.hpp"

namespace adlforge::app {

/// Every tunable of a run. Keys are "<section>.<name>"; environment
/// variables ADLFORGE_<SECTION>_<NAME> override file values.
struct RunConfig {
  // run
  std::uint64_t seed = 7;
  int workers = 1;
  std::string corpus;      // corpus.jsonl; empty = synthesize one
  std::string out = "adlforge-out";
  std::string cache_dir;   // empty = "<out>.cache"
  bool mock_backends = false;
  std::string fixtures;    // extra fixture file consulted before the synthetic responders
  std::string prompts_dir; // per-file prompt overrides

  // backends
  std::map<backends::Role, std::string> urls;
  std::map<backends::Role, std::string> models;
  int timeout_ms = 30000;
  int max_retries = 3;
  int backoff_ms = 200;
  int rate_per_minute = 0;

  // synthetic corpus
  int synth_subjects = 4;
  int synth_cameras = 2;
  int synth_clips_per_action = 1;
  int synth_min_frames = 10;
  int synth_max_frames = 20;
  double synth_fps = 10.0;

  // curation
  double margin_frac = 0.2;
  int min_box = 32;
  std::string crop_mode = "per_video_union";
  int out_size = 512;
  int sequence_count = 160;
  int min_len = 3;
  int max_len = 7;
  std::string sequence_generator = "sampler";
  int target_videos = 100;

  // annotate
  double target_fps = 0.5;

  // objects
  double min_sim = 0.0;
  bool exclusive = false;
  double confidence_floor = 0.1;

  // eval
  int k = 4;
  double clip_seconds = 60.0;

  /// Sets one key from its text form. Throws PreconditionError for unknown
  /// keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  /// Applies ADLFORGE_* variables found through `getenv` (defaults to
  /// std::getenv). Returns the keys that were overridden.
  std::vector<std::string> apply_env(const std::function<const char*(const char*)>& getenv = {});
  /// Range checks. Throws PreconditionError naming the key.
  void validate() const;
  nlohmann::json snapshot() const;

  std::filesystem::path cache_path() const;

  static const std::vector<std::string>& keys();
  /// "curation.margin_frac" -> "ADLFORGE_CURATION_MARGIN_FRAC".
  static std::string env_name(const std::string& key);
};

}  // namespace adlforge::app
