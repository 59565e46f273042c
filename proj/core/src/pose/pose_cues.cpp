#include "adlforge/pose/pose_cues.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <regex>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "adlforge/annotate/llm_parse.hpp"
#include "adlforge/model/error.hpp"
#include "adlforge/model/feature_matrix.hpp"

namespace adlforge::pose {

namespace fs = std::filesystem;

std::string_view joint_name(PeripheralJoint j) {
  switch (j) {
    case PeripheralJoint::head: return "head";
    case PeripheralJoint::right_hand: return "right hand";
    case PeripheralJoint::left_hand: return "left hand";
    case PeripheralJoint::right_knee: return "right knee";
    case PeripheralJoint::left_knee: return "left knee";
  }
  return "";
}

int JointIndexMap::index(PeripheralJoint j) const {
  switch (j) {
    case PeripheralJoint::head: return head;
    case PeripheralJoint::right_hand: return right_hand;
    case PeripheralJoint::left_hand: return left_hand;
    case PeripheralJoint::right_knee: return right_knee;
    case PeripheralJoint::left_knee: return left_knee;
  }
  return -1;
}

std::string build_pose_str(const std::vector<PeripheralJointTrace>& traces) {
  std::map<PeripheralJoint, const PeripheralJointTrace*> by_joint;
  for (const auto& t : traces)
    if (!by_joint.emplace(t.joint, &t).second)
      throw PreconditionError(fmt::format("duplicate trace for the {}", joint_name(t.joint)));
  std::size_t count = 0;
  for (auto j : kPoseStrOrder) {
    const auto it = by_joint.find(j);
    if (it == by_joint.end()) throw PreconditionError(fmt::format("missing trace for the {}", joint_name(j)));
    if (it->second->observations.empty()) throw PreconditionError(fmt::format("empty trace for the {}", joint_name(j)));
    if (count == 0) count = it->second->observations.size();
    if (it->second->observations.size() != count)
      throw PreconditionError("joint traces have different observation counts");
  }
  std::string out;
  for (std::size_t k = 0; k < count; ++k) {
    if (k) out += ' ';
    out += fmt::format("In observation {}, ", k);
    for (std::size_t n = 0; n < kPoseStrOrder.size(); ++n) {
      const auto j = kPoseStrOrder[n];
      const auto& [u, v] = by_joint[j]->observations[k];
      out += fmt::format("{}the {} is at ({}, {})", n ? " and " : "", joint_name(j), u, v);
    }
    out += '.';
  }
  return out;
}

std::vector<PeripheralJointTrace> parse_pose_str(const std::string& text) {
  static const std::regex sentence(
      R"(In observation (\d+), the right knee is at \((-?\d+), (-?\d+)\) and the left knee is at \((-?\d+), (-?\d+)\) )"
      R"(and the right hand is at \((-?\d+), (-?\d+)\) and the left hand is at \((-?\d+), (-?\d+)\) and the head is at )"
      R"(\((-?\d+), (-?\d+)\)\.)");
  std::vector<PeripheralJointTrace> traces;
  for (auto j : kPoseStrOrder) traces.push_back({j, {}});
  std::size_t expected = 0;
  std::size_t consumed = 0;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), sentence); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const auto gap = static_cast<std::size_t>(m.position(0)) - consumed;
    if (gap != (expected ? 1u : 0u)) throw ParseError("unexpected text between pose observations", text);
    if (std::stoul(m[1].str()) != expected) throw ParseError("observation numbers out of order", text);
    for (std::size_t n = 0; n < 5; ++n)
      traces[n].observations.emplace_back(std::stoi(m[2 + 2 * n].str()), std::stoi(m[3 + 2 * n].str()));
    consumed = static_cast<std::size_t>(m.position(0) + m.length(0));
    ++expected;
  }
  if (expected == 0 || consumed != text.size()) throw ParseError("not a pose string", text);
  return traces;
}

PoseSequence stitched_poses(const StitchedVideo& video, const std::vector<PoseSequence>& clip_poses,
                            const std::optional<curation::Letterbox>& lb) {
  if (clip_poses.size() != video.segments.size()) throw PreconditionError("one pose sequence per segment expected");
  PoseSequence out;
  out.joint_count = clip_poses.empty() ? 25 : clip_poses.front().joint_count;
  out.frame_width = lb ? lb->out_w : (clip_poses.empty() ? 0 : clip_poses.front().frame_width);
  out.frame_height = lb ? lb->out_h : (clip_poses.empty() ? 0 : clip_poses.front().frame_height);
  for (std::size_t k = 0; k < clip_poses.size(); ++k) {
    const auto& seg = video.segments[k];
    for (int f = 0; f < seg.length(); ++f) {
      // Clips whose pose track is shorter than the clip keep the last pose.
      const auto& frames = clip_poses[k].frames;
      PoseFrame pf = frames.empty() ? PoseFrame{} : frames[std::min<std::size_t>(f, frames.size() - 1)];
      if (lb)
        for (auto& person : pf.persons)
          for (auto& j : person.joints)
            if (j.valid_2d) {
              const auto p = lb->map(j.u, j.v);
              j.u = p.x;
              j.v = p.y;
            }
      out.frames.push_back(std::move(pf));
    }
  }
  return out;
}

std::vector<PeripheralJointTrace> extract_traces(const PoseSequence& poses, const std::vector<int>& frames,
                                                 const JointIndexMap& map) {
  std::vector<PeripheralJointTrace> out;
  for (auto j : kPoseStrOrder) {
    const int idx = map.index(j);
    if (idx < 0 || idx >= poses.joint_count) throw PreconditionError("joint index map outside the skeleton");
    auto visible = [&](int f) -> const Joint* {
      if (f < 0 || f >= static_cast<int>(poses.frames.size()) || poses.frames[f].persons.empty()) return nullptr;
      const auto& jt = poses.frames[f].persons.front().joints[idx];
      return jt.valid_2d ? &jt : nullptr;
    };
    PeripheralJointTrace trace{j, {}};
    bool warned = false;
    for (int f : frames) {
      const Joint* found = nullptr;
      const int span = static_cast<int>(poses.frames.size());
      for (int d = 0; d <= span && !found; ++d) found = visible(f - d) ? visible(f - d) : visible(f + d);
      if (!found) {
        if (!warned) spdlog::warn("the {} is never visible; reporting (0, 0)", joint_name(j));
        warned = true;
        trace.observations.emplace_back(0, 0);
        continue;
      }
      trace.observations.emplace_back(static_cast<int>(std::lround(found->u)), static_cast<int>(std::lround(found->v)));
    }
    out.push_back(std::move(trace));
  }
  return out;
}

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void require_text(const std::string& reply) {
  if (reply.find_first_not_of(" \t\r\n") == std::string::npos) throw ParseError("empty reply", reply);
}

}  // namespace

std::string pose_context(const std::vector<PeripheralJointTrace>& traces, backends::BackendClient& chat,
                         const annotate::PromptLibrary& prompts, const annotate::RetryPolicy& policy) {
  const auto reply =
      annotate::chat_structured_text(chat, {{"user", prompts.pose_description(build_pose_str(traces))}}, require_text, policy);
  const auto low = lower(reply);
  for (auto j : kPoseStrOrder)
    if (low.find(joint_name(j)) == std::string::npos)
      spdlog::warn("pose context does not mention the {}", joint_name(j));
  return reply;
}

std::vector<QaPair> pose_qa(const std::string& video_id, const std::vector<PeripheralJointTrace>& traces,
                            const std::string& action_label, backends::BackendClient& chat,
                            const annotate::PromptLibrary& prompts, const annotate::RetryPolicy& policy) {
  if (action_label.empty()) throw PreconditionError("pose QA needs an action label");
  const auto description = annotate::chat_structured_text(
      chat, {{"user", prompts.pose_qa_describe(action_label, build_pose_str(traces))}}, require_text, policy);

  const std::array<const char*, 2> canonical = {kPoseQuestionMotion, kPoseQuestionJoints};
  auto parse = [&](const std::string& reply) {
    auto value = annotate::parse_json_lenient(reply);
    if (!value) throw ParseError("pose QA reply is not a list", reply);
    if (!value->is_array() || value->size() != 2)
      throw ArityError(fmt::format("expected 2 pose QA items, got {}", value->is_array() ? value->size() : 1), reply);
    std::vector<QaPair> out;
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& item = (*value)[i];
      if (!item.is_object() || !item.contains("A") || !item["A"].is_string() || item["A"].get<std::string>().empty())
        throw ParseError(fmt::format("pose QA item {} has no answer", i), reply);
      std::string q = item.contains("Q") && item["Q"].is_string() ? item["Q"].get<std::string>() : "";
      if (q.find_first_not_of(" \t\r\n") == std::string::npos) q = canonical[i];
      out.push_back({video_id, q, item["A"].get<std::string>(), QaType::pose_qa, QaSource::template_, std::nullopt});
    }
    return out;
  };
  return annotate::chat_structured<std::vector<QaPair>>(chat, {{"user", prompts.pose_qa_generate(description)}},
                                                        parse, policy);
}

fs::path package_pose_features(const fs::path& in, const fs::path& out_dir, const std::string& model_id) {
  FeatureMatrix m = read_feature_matrix(in);
  if (m.dim() != kPoseFeatureDim)
    throw ValidationError(fmt::format("{}: pose features must have dim {}, found {}", in.string(), kPoseFeatureDim, m.dim()));
  m.meta().producer = kProducerPose;
  if (!model_id.empty()) m.meta().model_id = model_id;
  if (m.meta().subject_id.empty()) m.meta().subject_id = feature_stem(in).filename().string();
  m.validate();
  const auto stem = out_dir / feature_stem(in).filename();
  write_feature_matrix(m, stem);
  return stem;
}

}  // namespace adlforge::pose
