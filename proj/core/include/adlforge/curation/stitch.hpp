#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "adlforge/curation/codec.hpp"
#include "adlforge/curation/crop.hpp"
#include "adlforge/curation/sequences.hpp"
#include "adlforge/model/types.hpp"

namespace adlforge::curation {

struct StitchOptions {
  std::uint64_t seed = 7;
  int target_count = 100;
  /// Sequence draws per video before giving up.
  int max_attempts = 64;
};

struct RenderOptions {
  CropOptions crop;
  CropMode mode = CropMode::per_video_union;
  int out_w = 512;
  int out_h = 512;
};

std::string video_id(int index);

/// Chooses sequences, subject/camera groups and clips for `target_count`
/// videos. Pure: no media is touched. Segments are filled, video_path is not.
std::vector<StitchedVideo> assign_clips(const std::vector<CompositeSequence>& sequences,
                                        const std::vector<ClipRecord>& corpus, const StitchOptions& opt);

/// Clips of `video` in segment order, looked up by clip_id.
std::vector<const ClipRecord*> segment_clips(const StitchedVideo& video,
                                             const std::map<std::string, const ClipRecord*>& by_id);

/// Crops, letterboxes and concatenates the clips of `video` into
/// `out_path`; sets crop_box and fps. `corpus_manifest` anchors relative
/// media and pose paths.
void render_stitched(StitchedVideo& video, const std::vector<const ClipRecord*>& clips,
                     const std::filesystem::path& corpus_manifest, VideoCodec& codec,
                     const RenderOptions& opt, const std::filesystem::path& out_path);

}  // namespace adlforge::curation
