#pragma once

#include <filesystem>

#include "adlforge/model/types.hpp"

namespace adlforge {

inline constexpr int kNtuColorWidth = 1920;
inline constexpr int kNtuColorHeight = 1080;

/// Parses the NTU RGB+D `.skeleton` text format. 2D coordinates come from the
/// color-space joint columns; joints outside the color frame are flagged
/// invalid.
PoseSequence parse_ntu_skeleton(std::string_view text);

/// Loads a pose sidecar: `.skeleton` (NTU text) or `.json` (see json_io).
PoseSequence load_pose_sequence(const std::filesystem::path& path);
void save_pose_json(const PoseSequence& poses, const std::filesystem::path& path);

/// Re-evaluates `valid_2d` of every joint against the declared frame bounds.
void flag_out_of_frame_joints(PoseSequence& poses);

}  // namespace adlforge
