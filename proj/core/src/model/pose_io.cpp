#include "adlforge/model/pose_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "adlforge/model/error.hpp"
#include "adlforge/model/json_io.hpp"
#include "adlforge/model/manifest.hpp"

namespace adlforge {

namespace {

class Tokens {
 public:
  explicit Tokens(std::string_view text) : text_(text) {}

  std::string_view next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ >= text_.size()) throw ManifestError("skeleton file truncated");
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  long long next_int() {
    auto tok = next();
    long long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
      throw ManifestError(fmt::format("skeleton file: expected integer, got '{}'", tok));
    return v;
  }

  double next_double() {
    auto tok = next();
    // from_chars for double is available in libstdc++ 11.
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
      throw ManifestError(fmt::format("skeleton file: expected number, got '{}'", tok));
    return v;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

PoseSequence parse_ntu_skeleton(std::string_view text) {
  Tokens tok(text);
  PoseSequence seq;
  seq.frame_width = kNtuColorWidth;
  seq.frame_height = kNtuColorHeight;
  const long long frame_count = tok.next_int();
  if (frame_count < 0) throw ManifestError("skeleton file: negative frame count");
  seq.frames.reserve(static_cast<std::size_t>(frame_count));
  int joint_count = -1;
  for (long long f = 0; f < frame_count; ++f) {
    PoseFrame frame;
    const long long bodies = tok.next_int();
    for (long long b = 0; b < bodies; ++b) {
      for (int k = 0; k < 10; ++k) tok.next();  // body header
      const long long joints = tok.next_int();
      if (joint_count < 0) joint_count = static_cast<int>(joints);
      if (joints != joint_count)
        throw ManifestError(fmt::format("skeleton file: frame {} has {} joints, expected {}", f,
                                        joints, joint_count));
      Skeleton s;
      s.joints.reserve(static_cast<std::size_t>(joints));
      for (long long j = 0; j < joints; ++j) {
        Joint jt;
        jt.x = tok.next_double();
        jt.y = tok.next_double();
        jt.z = tok.next_double();
        tok.next_double();  // depthX
        tok.next_double();  // depthY
        jt.u = tok.next_double();
        jt.v = tok.next_double();
        for (int k = 0; k < 5; ++k) tok.next();  // orientation + tracking state
        s.joints.push_back(jt);
      }
      frame.persons.push_back(std::move(s));
    }
    seq.frames.push_back(std::move(frame));
  }
  seq.joint_count = joint_count < 0 ? 25 : joint_count;
  flag_out_of_frame_joints(seq);
  return seq;
}

void flag_out_of_frame_joints(PoseSequence& poses) {
  for (auto& f : poses.frames)
    for (auto& s : f.persons)
      for (auto& j : s.joints) {
        if (!j.valid_2d) continue;
        j.valid_2d = std::isfinite(j.u) && std::isfinite(j.v) && j.u >= 0 && j.v >= 0 &&
                     j.u < poses.frame_width && j.v < poses.frame_height;
      }
}

PoseSequence load_pose_sequence(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".skeleton") return parse_ntu_skeleton(text);
  try {
    auto seq = nlohmann::json::parse(text).get<PoseSequence>();
    flag_out_of_frame_joints(seq);
    return seq;
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(fmt::format("{}: bad pose file ({})", path.string(), e.what()));
  } catch (const ManifestError& e) {
    throw ManifestError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void save_pose_json(const PoseSequence& poses, const std::filesystem::path& path) {
  write_file_atomic(path, nlohmann::json(poses).dump() + "\n");
}

}  // namespace adlforge
