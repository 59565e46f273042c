#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adlforge {

/// One trimmed single-action clip of the source corpus.
struct ClipRecord {
  std::string clip_id;
  std::string subject_id;
  std::string camera_id;
  int action_id = 0;
  std::string action_label;
  std::string video_path;
  int num_frames = 0;
  double fps = 0.0;
  std::optional<std::string> pose_path;

  friend bool operator==(const ClipRecord&, const ClipRecord&) = default;
};

struct Joint {
  double x = 0, y = 0, z = 0;  // sensor space
  double u = 0, v = 0;         // image space, pixels
  bool valid_2d = true;

  friend bool operator==(const Joint&, const Joint&) = default;
};

struct Skeleton {
  std::vector<Joint> joints;

  friend bool operator==(const Skeleton&, const Skeleton&) = default;
};

struct PoseFrame {
  std::vector<Skeleton> persons;

  friend bool operator==(const PoseFrame&, const PoseFrame&) = default;
};

/// Per-frame skeletons of a clip. 2D coordinates refer to a frame of
/// frame_width x frame_height pixels.
struct PoseSequence {
  int joint_count = 25;
  int frame_width = 0;
  int frame_height = 0;
  std::vector<PoseFrame> frames;

  std::vector<int> persons_per_frame() const;

  friend bool operator==(const PoseSequence&, const PoseSequence&) = default;
};

/// Pixel rectangle with corners (x1,y1) and (x2,y2) inside a frame_w x
/// frame_h frame. Crops take columns [x1,x2) and rows [y1,y2).
struct CropBox {
  int x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  int frame_w = 0, frame_h = 0;

  int width() const { return x2 - x1; }
  int height() const { return y2 - y1; }
  bool valid() const {
    return 0 <= x1 && x1 < x2 && x2 <= frame_w && 0 <= y1 && y1 < y2 && y2 <= frame_h;
  }
  bool contains(const CropBox& other) const {
    return x1 <= other.x1 && y1 <= other.y1 && other.x2 <= x2 && other.y2 <= y2;
  }

  friend bool operator==(const CropBox&, const CropBox&) = default;
};

struct Segment {
  std::string clip_id;
  int action_id = 0;
  std::string action_label;
  int start_frame = 0;
  int end_frame = 0;

  int length() const { return end_frame - start_frame; }

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// A composite video made of same-subject, same-camera clips.
struct StitchedVideo {
  std::string video_id;
  std::string subject_id;
  std::string camera_id;
  std::string sequence_id;
  std::vector<Segment> segments;
  std::string video_path;
  double fps = 0.0;
  std::optional<CropBox> crop_box;

  int total_frames() const { return segments.empty() ? 0 : segments.back().end_frame; }
  std::vector<std::string> action_labels() const;

  friend bool operator==(const StitchedVideo&, const StitchedVideo&) = default;
};

enum class QaType {
  dense_description,
  summary,
  detail,
  action_sequence,
  pose_qa,
  object_qa,
  pose_context_augmented,
  object_context_augmented,
};

enum class QaSource { llm, template_ };

std::string_view to_string(QaType t);
std::string_view to_string(QaSource s);
QaType qa_type_from_string(std::string_view s);
QaSource qa_source_from_string(std::string_view s);
bool is_context_augmented(QaType t);

struct QaPair {
  std::string video_id;
  std::string question;
  std::string answer;
  QaType qtype = QaType::summary;
  QaSource source = QaSource::llm;
  std::optional<std::string> context_prefix;

  friend bool operator==(const QaPair&, const QaPair&) = default;
};

/// Checks the per-pair invariants (non-empty text, context prefix rule).
/// Throws ValidationError.
void validate_qa_pair(const QaPair& qa);

/// Checks tiling, ordering and crop invariants of a stitched manifest entry.
/// Throws ValidationError naming the video and offending segment.
void validate_stitched(const StitchedVideo& video);

}  // namespace adlforge
