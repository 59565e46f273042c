#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adlforge/annotate/llm_call.hpp"
#include "adlforge/annotate/prompts.hpp"
#include "adlforge/backends/client.hpp"
#include "adlforge/curation/crop.hpp"
#include "adlforge/model/types.hpp"

namespace adlforge::pose {

enum class PeripheralJoint { head, right_hand, left_hand, right_knee, left_knee };

/// Order in which joints appear in a pose string.
inline constexpr std::array<PeripheralJoint, 5> kPoseStrOrder = {
    PeripheralJoint::right_knee, PeripheralJoint::left_knee, PeripheralJoint::right_hand,
    PeripheralJoint::left_hand, PeripheralJoint::head};

std::string_view joint_name(PeripheralJoint j);  // "right knee", ...

/// Skeleton joint index of each peripheral joint (NTU 25-joint layout,
/// 0-based; hand joints rather than fingertips).
struct JointIndexMap {
  int head = 3;
  int left_hand = 7;
  int right_hand = 11;
  int left_knee = 13;
  int right_knee = 17;

  int index(PeripheralJoint j) const;
};

struct PeripheralJointTrace {
  PeripheralJoint joint = PeripheralJoint::head;
  std::vector<std::pair<int, int>> observations;  // (u, v) pixels

  friend bool operator==(const PeripheralJointTrace&, const PeripheralJointTrace&) = default;
};

/// "In observation k, the right knee is at (u, v) and ... the head is at (u, v)."
/// sentences joined by single spaces.
std::string build_pose_str(const std::vector<PeripheralJointTrace>& traces);

/// Inverse of build_pose_str. Throws ParseError.
std::vector<PeripheralJointTrace> parse_pose_str(const std::string& text);

/// Poses of the clips of a stitched video concatenated in segment order, with
/// 2D joints mapped into output canvas coordinates when `lb` is given.
PoseSequence stitched_poses(const StitchedVideo& video, const std::vector<PoseSequence>& clip_poses,
                            const std::optional<curation::Letterbox>& lb);

/// Observations of the five joints at `frames`. Frames where a joint is
/// missing take the value of the nearest frame where it is visible.
std::vector<PeripheralJointTrace> extract_traces(const PoseSequence& poses, const std::vector<int>& frames,
                                                 const JointIndexMap& map = {});

/// Joint-motion description used as pose context.
std::string pose_context(const std::vector<PeripheralJointTrace>& traces, backends::BackendClient& chat,
                         const annotate::PromptLibrary& prompts = annotate::PromptLibrary::builtin(),
                         const annotate::RetryPolicy& policy = {});

inline constexpr const char* kPoseQuestionMotion = "What is the motion of the body and joints relative to the actions?";
inline constexpr const char* kPoseQuestionJoints = "Which joints are moving in the video?";

/// Two-step chain: pose description, then two QA pairs about it.
std::vector<QaPair> pose_qa(const std::string& video_id, const std::vector<PeripheralJointTrace>& traces,
                            const std::string& action_label, backends::BackendClient& chat,
                            const annotate::PromptLibrary& prompts = annotate::PromptLibrary::builtin(),
                            const annotate::RetryPolicy& policy = {});

/// Validates a precomputed pose feature pair (dim 216) and re-emits it under
/// `out_dir` with producer "poselm". Returns the written stem.
std::filesystem::path package_pose_features(const std::filesystem::path& in, const std::filesystem::path& out_dir,
                                            const std::string& model_id = {});

}  // namespace adlforge::pose
