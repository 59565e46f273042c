#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <opencv2/core.hpp>

#include "adlforge/backends/client.hpp"
#include "adlforge/curation/codec.hpp"
#include "adlforge/model/types.hpp"

namespace adlforge::annotate {

/// Frame indices round(k * fps / target_fps), k = 0, 1, ... below num_frames,
/// deduplicated. Always contains 0.
std::vector<int> sample_frames(int num_frames, double fps, double target_fps);

/// frame index -> caption of one video.
struct CaptionDict {
  std::string video_id;
  std::map<int, std::string> entries;
  double sample_rate_fps = 0.5;
  std::vector<int> failed_frames;

  friend bool operator==(const CaptionDict&, const CaptionDict&) = default;
};

struct CaptionOptions {
  double target_fps = 0.5;
  /// Fraction of failed frames above which the whole video fails.
  double max_failure_frac = 0.5;
  /// Prompts issued per frame; replies are joined with `joiner`. Empty means
  /// the built-in pair.
  std::vector<std::string> prompts;
  std::string joiner = " | ";
  int jpeg_quality = 90;
};

/// Captions already-decoded frames (`frames[i]` is frame `indices[i]`).
CaptionDict caption_frames(const std::string& video_id, const std::vector<int>& indices,
                           const std::vector<cv::Mat>& frames, backends::BackendClient& captioner,
                           const CaptionOptions& opt = {});

/// Samples, decodes and captions a stitched video.
CaptionDict caption_video(const StitchedVideo& video, const std::filesystem::path& media,
                          curation::VideoCodec& codec, backends::BackendClient& captioner,
                          const CaptionOptions& opt = {});

/// "In frame <i>: <caption>" lines joined by newlines.
std::string serialize_mega_caption(const CaptionDict& captions);

nlohmann::json to_json(const CaptionDict& c);
CaptionDict caption_dict_from_json(const nlohmann::json& j);

}  // namespace adlforge::annotate
