#include "adlforge/model/types.hpp"

#include <array>
#include <utility>

#include <fmt/format.h>

#include "adlforge/model/error.hpp"

namespace adlforge {

std::vector<int> PoseSequence::persons_per_frame() const {
  std::vector<int> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(static_cast<int>(f.persons.size()));
  return out;
}

std::vector<std::string> StitchedVideo::action_labels() const {
  std::vector<std::string> out;
  out.reserve(segments.size());
  for (const auto& s : segments) out.push_back(s.action_label);
  return out;
}

namespace {

constexpr std::array<std::pair<QaType, std::string_view>, 8> kQaTypeNames{{
    {QaType::dense_description, "dense_description"},
    {QaType::summary, "summary"},
    {QaType::detail, "detail"},
    {QaType::action_sequence, "action_sequence"},
    {QaType::pose_qa, "pose_qa"},
    {QaType::object_qa, "object_qa"},
    {QaType::pose_context_augmented, "pose_context_augmented"},
    {QaType::object_context_augmented, "object_context_augmented"},
}};

}  // namespace

std::string_view to_string(QaType t) {
  for (const auto& [k, v] : kQaTypeNames)
    if (k == t) return v;
  return "unknown";
}

std::string_view to_string(QaSource s) { return s == QaSource::llm ? "llm" : "template"; }

QaType qa_type_from_string(std::string_view s) {
  for (const auto& [k, v] : kQaTypeNames)
    if (v == s) return k;
  throw ManifestError(fmt::format("unknown qtype '{}'", s));
}

QaSource qa_source_from_string(std::string_view s) {
  if (s == "llm") return QaSource::llm;
  if (s == "template") return QaSource::template_;
  throw ManifestError(fmt::format("unknown QA source '{}'", s));
}

bool is_context_augmented(QaType t) {
  return t == QaType::pose_context_augmented || t == QaType::object_context_augmented;
}

void validate_qa_pair(const QaPair& qa) {
  if (qa.video_id.empty()) throw ValidationError("QA pair without video_id");
  if (qa.question.empty())
    throw ValidationError(fmt::format("video {}: empty question", qa.video_id));
  if (qa.answer.empty())
    throw ValidationError(fmt::format("video {}: empty answer", qa.video_id));
  if (is_context_augmented(qa.qtype)) {
    if (!qa.context_prefix || qa.context_prefix->empty())
      throw ValidationError(
          fmt::format("video {}: {} pair without context_prefix", qa.video_id, to_string(qa.qtype)));
    if (!qa.question.starts_with(*qa.context_prefix))
      throw ValidationError(fmt::format("video {}: question does not begin with its context prefix",
                                        qa.video_id));
  }
}

void validate_stitched(const StitchedVideo& v) {
  if (v.video_id.empty()) throw ValidationError("stitched video without video_id");
  if (v.segments.empty())
    throw ValidationError(fmt::format("video {}: no segments", v.video_id));
  if (!(v.fps > 0)) throw ValidationError(fmt::format("video {}: fps must be > 0", v.video_id));
  int expected_start = 0;
  for (std::size_t k = 0; k < v.segments.size(); ++k) {
    const auto& s = v.segments[k];
    if (s.start_frame != expected_start)
      throw ValidationError(fmt::format(
          "video {}: segment {} ({}) starts at frame {} but previous segment ends at {}", v.video_id,
          k, s.clip_id, s.start_frame, expected_start));
    if (s.end_frame <= s.start_frame)
      throw ValidationError(fmt::format("video {}: segment {} ({}) is empty [{}, {})", v.video_id,
                                        k, s.clip_id, s.start_frame, s.end_frame));
    if (s.action_id < 1)
      throw ValidationError(
          fmt::format("video {}: segment {} has invalid action_id {}", v.video_id, k, s.action_id));
    expected_start = s.end_frame;
  }
  if (v.crop_box && !v.crop_box->valid())
    throw ValidationError(fmt::format("video {}: crop box ({},{},{},{}) outside {}x{} frame",
                                      v.video_id, v.crop_box->x1, v.crop_box->y1, v.crop_box->x2,
                                      v.crop_box->y2, v.crop_box->frame_w, v.crop_box->frame_h));
}

}  // namespace adlforge
