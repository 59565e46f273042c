#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "adlforge/curation/codec.hpp"
#include "adlforge/model/action_vocab.hpp"
#include "adlforge/model/types.hpp"

namespace adlforge::curation {

/// Parameters of a procedurally generated NTU-style corpus: one stick
/// figure per clip with action-dependent limb motion and matching skeletons.
struct SyntheticCorpusOptions {
  int subjects = 4;
  int cameras = 2;
  int clips_per_action = 1;
  int width = 320;
  int height = 240;
  double fps = 10.0;
  int min_frames = 10;
  int max_frames = 20;
  std::uint64_t seed = 1;
};

std::string clip_id(int subject, int camera, int action, int repetition);

/// Skeleton of one synthetic frame (25 NTU joints).
PoseFrame synthetic_pose(int action_id, int frame, std::uint64_t clip_seed, int width, int height);

/// Writes `<dir>/clips/*`, `<dir>/poses/*.json` and `<dir>/corpus.jsonl`.
/// Returns the records in manifest order.
std::vector<ClipRecord> write_synthetic_corpus(const std::filesystem::path& dir, const ActionVocabulary& vocab,
                                               const SyntheticCorpusOptions& opt, VideoCodec& codec);

}  // namespace adlforge::curation
