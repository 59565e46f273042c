#include "adlforge/model/json_io.hpp"

#include <fmt/format.h>

#include "adlforge/model/error.hpp"

namespace adlforge {

using nlohmann::json;

namespace {

template <typename T>
T required(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) throw ManifestError(fmt::format("missing field '{}'", key));
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ManifestError(fmt::format("field '{}' has the wrong type", key));
  }
}

}  // namespace

void to_json(json& j, const ClipRecord& c) {
  j = json{{"clip_id", c.clip_id},     {"subject_id", c.subject_id},
           {"camera_id", c.camera_id}, {"action_id", c.action_id},
           {"action_label", c.action_label}, {"video_path", c.video_path},
           {"num_frames", c.num_frames}, {"fps", c.fps}};
  if (c.pose_path) j["pose_path"] = *c.pose_path;
}

void from_json(const json& j, ClipRecord& c) {
  if (!j.is_object()) throw ManifestError("record is not a JSON object");
  c.clip_id = required<std::string>(j, "clip_id");
  c.subject_id = required<std::string>(j, "subject_id");
  c.camera_id = required<std::string>(j, "camera_id");
  c.action_id = required<int>(j, "action_id");
  c.action_label = required<std::string>(j, "action_label");
  c.video_path = required<std::string>(j, "video_path");
  c.num_frames = required<int>(j, "num_frames");
  c.fps = required<double>(j, "fps");
  c.pose_path.reset();
  if (auto it = j.find("pose_path"); it != j.end() && !it->is_null())
    c.pose_path = it->get<std::string>();
}

void to_json(json& j, const CropBox& b) {
  j = json{{"x1", b.x1}, {"y1", b.y1}, {"x2", b.x2}, {"y2", b.y2},
           {"frame_w", b.frame_w}, {"frame_h", b.frame_h}};
}

void from_json(const json& j, CropBox& b) {
  b.x1 = required<int>(j, "x1");
  b.y1 = required<int>(j, "y1");
  b.x2 = required<int>(j, "x2");
  b.y2 = required<int>(j, "y2");
  b.frame_w = required<int>(j, "frame_w");
  b.frame_h = required<int>(j, "frame_h");
}

void to_json(json& j, const Segment& s) {
  j = json{{"clip_id", s.clip_id},           {"action_id", s.action_id},
           {"action_label", s.action_label}, {"start_frame", s.start_frame},
           {"end_frame", s.end_frame}};
}

void from_json(const json& j, Segment& s) {
  s.clip_id = required<std::string>(j, "clip_id");
  s.action_id = required<int>(j, "action_id");
  s.action_label = required<std::string>(j, "action_label");
  s.start_frame = required<int>(j, "start_frame");
  s.end_frame = required<int>(j, "end_frame");
}

void to_json(json& j, const StitchedVideo& v) {
  j = json{{"video_id", v.video_id},     {"subject_id", v.subject_id},
           {"camera_id", v.camera_id},   {"sequence_id", v.sequence_id},
           {"segments", v.segments},     {"video_path", v.video_path},
           {"fps", v.fps}};
  if (v.crop_box) j["crop_box"] = *v.crop_box;
}

void from_json(const json& j, StitchedVideo& v) {
  if (!j.is_object()) throw ManifestError("record is not a JSON object");
  v.video_id = required<std::string>(j, "video_id");
  v.subject_id = required<std::string>(j, "subject_id");
  v.camera_id = required<std::string>(j, "camera_id");
  v.sequence_id = j.value("sequence_id", std::string{});
  v.segments = required<std::vector<Segment>>(j, "segments");
  v.video_path = required<std::string>(j, "video_path");
  v.fps = required<double>(j, "fps");
  v.crop_box.reset();
  if (auto it = j.find("crop_box"); it != j.end() && !it->is_null()) v.crop_box = it->get<CropBox>();
}

void to_json(json& j, const QaPair& q) {
  j = json{{"video_id", q.video_id},
           {"question", q.question},
           {"answer", q.answer},
           {"qtype", std::string(to_string(q.qtype))},
           {"source", std::string(to_string(q.source))}};
  if (q.context_prefix) j["context_prefix"] = *q.context_prefix;
}

void from_json(const json& j, QaPair& q) {
  if (!j.is_object()) throw ManifestError("record is not a JSON object");
  q.video_id = required<std::string>(j, "video_id");
  q.question = required<std::string>(j, "question");
  q.answer = required<std::string>(j, "answer");
  q.qtype = qa_type_from_string(required<std::string>(j, "qtype"));
  q.source = qa_source_from_string(required<std::string>(j, "source"));
  q.context_prefix.reset();
  if (auto it = j.find("context_prefix"); it != j.end() && !it->is_null())
    q.context_prefix = it->get<std::string>();
}

void to_json(json& j, const FeatureMeta& m) {
  j = json{{"producer", m.producer}, {"model_id", m.model_id}, {"subject_id", m.subject_id}};
}

void from_json(const json& j, FeatureMeta& m) {
  m.producer = j.value("producer", std::string{});
  m.model_id = j.value("model_id", std::string{});
  m.subject_id = j.value("subject_id", std::string{});
}

// Joints are stored as [x, y, z, u, v] with null u/v for missing 2D points.
void to_json(json& j, const PoseSequence& p) {
  json frames = json::array();
  for (const auto& f : p.frames) {
    json persons = json::array();
    for (const auto& s : f.persons) {
      json joints = json::array();
      for (const auto& jt : s.joints) {
        if (jt.valid_2d)
          joints.push_back({jt.x, jt.y, jt.z, jt.u, jt.v});
        else
          joints.push_back({jt.x, jt.y, jt.z, nullptr, nullptr});
      }
      persons.push_back(std::move(joints));
    }
    frames.push_back(std::move(persons));
  }
  j = json{{"joint_count", p.joint_count},
           {"frame_width", p.frame_width},
           {"frame_height", p.frame_height},
           {"frames", std::move(frames)}};
}

void from_json(const json& j, PoseSequence& p) {
  p.joint_count = required<int>(j, "joint_count");
  p.frame_width = required<int>(j, "frame_width");
  p.frame_height = required<int>(j, "frame_height");
  p.frames.clear();
  const auto& frames = j.at("frames");
  p.frames.reserve(frames.size());
  for (const auto& f : frames) {
    PoseFrame frame;
    for (const auto& person : f) {
      Skeleton s;
      if (static_cast<int>(person.size()) != p.joint_count)
        throw ManifestError(fmt::format("skeleton has {} joints, expected {}", person.size(),
                                        p.joint_count));
      for (const auto& jt : person) {
        Joint joint;
        joint.x = jt.at(0).get<double>();
        joint.y = jt.at(1).get<double>();
        joint.z = jt.at(2).get<double>();
        if (jt.size() >= 5 && !jt.at(3).is_null() && !jt.at(4).is_null()) {
          joint.u = jt.at(3).get<double>();
          joint.v = jt.at(4).get<double>();
          joint.valid_2d = true;
        } else {
          joint.valid_2d = false;
        }
        s.joints.push_back(joint);
      }
      frame.persons.push_back(std::move(s));
    }
    p.frames.push_back(std::move(frame));
  }
}

}  // namespace adlforge
