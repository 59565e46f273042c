#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <opencv2/core.hpp>

#include "adlforge/annotate/llm_call.hpp"
#include "adlforge/annotate/prompts.hpp"
#include "adlforge/backends/client.hpp"
#include "adlforge/model/feature_matrix.hpp"
#include "adlforge/model/types.hpp"

namespace adlforge::objects {

inline constexpr int kSampledFrames = 8;

/// floor(k * num_frames / count) for k = 0..count-1 (duplicates kept for
/// clips shorter than `count`).
std::vector<int> uniform_sample_indices(int num_frames, int count = kSampledFrames);

/// Case-folded union of per-frame detections in first-seen order.
std::vector<std::string> merge_detections(const std::vector<std::vector<std::string>>& per_frame);

/// One detector call per frame; failed frames are skipped. Throws when every
/// frame fails.
std::vector<std::string> detect_objects(const std::vector<cv::Mat>& frames, backends::BackendClient& detector,
                                        int jpeg_quality = 90);
std::vector<std::string> detect_objects(const std::vector<backends::EncodedImage>& frames,
                                        backends::BackendClient& detector);

struct RelevanceResult {
  std::vector<std::string> relevant;
  std::vector<std::string> dropped;  // reply names not in `found`
};

/// Splits a comma-separated relevance reply; "None" means no objects. Keeps
/// only names present in `found` (compared case-folded), in reply order.
RelevanceResult parse_relevance_reply(const std::string& reply, const std::vector<std::string>& found);

RelevanceResult filter_relevant(const std::string& action_label, const std::vector<std::string>& found,
                                backends::BackendClient& chat,
                                const annotate::PromptLibrary& prompts = annotate::PromptLibrary::builtin(),
                                const annotate::RetryPolicy& policy = {});

using Box = std::array<double, 4>;  // x1, y1, x2, y2
using Links = std::vector<std::vector<std::optional<int>>>;  // [transition][object] -> next object

/// Relevant objects of one clip: boxes B_t and features O_t over the
/// sampled frames, plus frame-to-frame links.
struct ObjectTrackSet {
  std::string video_id;
  std::string clip_id;
  std::vector<std::string> labels;                  // n, relevance-ordered
  std::vector<int> frames;                          // sampled frame indices (absolute)
  std::vector<std::vector<std::optional<Box>>> boxes;  // [t][i]; nullopt = absent
  FeatureMatrix features;                           // row t*n + i; zero rows for absent objects
  Links links;                                      // [t][i] for t in [0, frames-1)

  int n() const { return static_cast<int>(labels.size()); }
  bool present(int t, int i) const { return boxes[t][i].has_value(); }
  /// Throws ValidationError on any broken structural invariant.
  void validate() const;
};

struct LocalizeOptions {
  double confidence_floor = 0.1;
  int jpeg_quality = 90;
  std::string model_id;
};

/// Localizes every label on every frame, keeping the best box per label.
ObjectTrackSet localize_and_embed(const std::string& video_id, const std::string& clip_id,
                                  const std::vector<int>& frame_indices, const std::vector<cv::Mat>& frames,
                                  const std::vector<std::string>& labels, backends::BackendClient& localizer,
                                  const LocalizeOptions& opt = {});
/// Same, for frames already encoded; boxes are clamped to `frame_size`.
ObjectTrackSet localize_and_embed(const std::string& video_id, const std::string& clip_id,
                                  const std::vector<int>& frame_indices,
                                  const std::vector<backends::EncodedImage>& frames, cv::Size frame_size,
                                  const std::vector<std::string>& labels, backends::BackendClient& localizer,
                                  const LocalizeOptions& opt = {});

struct TrackOptions {
  double min_sim = 0.0;
  bool exclusive = false;
};

double cosine(std::span<const float> a, std::span<const float> b);

/// Links objects of frame t to frame t+1 by cosine argmax (ties: lowest j);
/// `present[t][i]` marks rows that take part. Rows are t*n + i of `data`.
Links track_features(std::span<const float> data, int dim, int frames, int n,
                     const std::vector<std::vector<bool>>& present, const TrackOptions& opt = {});

void track_by_similarity(ObjectTrackSet& set, const TrackOptions& opt = {});

struct ObjectCues {
  std::vector<QaPair> qa;  // the two templated object questions
  std::string context;
};

std::string object_context(const std::vector<std::string>& labels);

/// Object QA/context from the clips of one video (labels merged in order).
ObjectCues object_qa_and_context(const std::string& video_id, const std::vector<const ObjectTrackSet*>& sets);
ObjectCues object_qa_and_context(const ObjectTrackSet& set);

std::string format_box(const Box& b);

/// Track file (labels, frames, boxes, links) without features.
nlohmann::json track_to_json(const ObjectTrackSet& set);
ObjectTrackSet track_from_json(const nlohmann::json& j);
/// Writes `<dir>/<clip_id>.json` and the `<clip_id>.features` feature pair.
void write_trackset(const ObjectTrackSet& set, const std::filesystem::path& dir);
ObjectTrackSet read_trackset(const std::filesystem::path& json_path);

}  // namespace adlforge::objects
