#include "adlforge/curation/synthetic.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <opencv2/imgproc.hpp>

#include "adlforge/model/hashing.hpp"
#include "adlforge/model/manifest.hpp"
#include "adlforge/model/parallel.hpp"
#include "adlforge/model/pose_io.hpp"
#include "adlforge/model/rng.hpp"

namespace adlforge::curation {

namespace fs = std::filesystem;

std::string clip_id(int subject, int camera, int action, int repetition) {
  return fmt::format("S{:03d}C{:03d}A{:03d}R{:03d}", subject, camera, action, repetition);
}

namespace {

// Standing pose in body units (height ~1.0), origin at the spine base, y down.
constexpr std::array<std::array<double, 2>, 25> kTemplate = {{
    {0.00, 0.00},   {0.00, -0.25},  {0.00, -0.50},  {0.00, -0.62},  {0.12, -0.47},
    {0.16, -0.30},  {0.18, -0.15},  {0.19, -0.10},  {-0.12, -0.47}, {-0.16, -0.30},
    {-0.18, -0.15}, {-0.19, -0.10}, {0.08, 0.00},   {0.09, 0.20},   {0.09, 0.38},
    {0.12, 0.40},   {-0.08, 0.00},  {-0.09, 0.20},  {-0.09, 0.38},  {-0.12, 0.40},
    {0.00, -0.45},  {0.20, -0.06},  {0.17, -0.08},  {-0.20, -0.06}, {-0.17, -0.08},
}};

constexpr std::array<std::pair<int, int>, 24> kBones = {{
    {0, 1},  {1, 20}, {20, 2}, {2, 3},   {20, 4},  {4, 5},   {5, 6},   {6, 7},
    {7, 21}, {7, 22}, {20, 8}, {8, 9},   {9, 10},  {10, 11}, {11, 23}, {11, 24},
    {0, 12}, {12, 13}, {13, 14}, {14, 15}, {0, 16}, {16, 17}, {17, 18}, {18, 19},
}};

struct Placement {
  double cx, hip_y, scale;
};

Placement placement(std::uint64_t clip_seed, int width, int height) {
  Rng rng(clip_seed);
  return {width * (0.35 + 0.3 * rng.uniform01()), height * (0.52 + 0.06 * rng.uniform01()),
          height * (0.55 + 0.2 * rng.uniform01())};
}

}  // namespace

PoseFrame synthetic_pose(int action_id, int frame, std::uint64_t clip_seed, int width, int height) {
  const Placement p = placement(clip_seed, width, height);
  const double period = 8.0 + action_id % 7;
  const double phi = 2.0 * std::numbers::pi * frame / period;
  const double raise_r = 0.05 + 0.25 * ((action_id * 37) % 11) / 10.0;
  const double raise_l = 0.05 + 0.20 * ((action_id * 53) % 7) / 6.0;
  const double bend = 0.02 + 0.06 * ((action_id * 29) % 5) / 4.0;
  const double drift = 0.004 * ((action_id % 5) - 2) * frame;
  const double wave_r = 0.5 - 0.5 * std::cos(phi);
  const double wave_l = 0.5 - 0.5 * std::cos(phi + std::numbers::pi / 2);
  const double knee = 0.5 - 0.5 * std::cos(phi / 2);

  Skeleton s;
  s.joints.resize(25);
  for (int j = 0; j < 25; ++j) {
    double x = kTemplate[j][0] + drift, y = kTemplate[j][1];
    switch (j) {
      case 9: y -= 0.5 * raise_r * wave_r; break;
      case 10: case 11: case 23: case 24: y -= raise_r * wave_r * 1.6; x -= 0.05 * wave_r; break;
      case 5: y -= 0.5 * raise_l * wave_l; break;
      case 6: case 7: case 21: case 22: y -= raise_l * wave_l * 1.6; x += 0.05 * wave_l; break;
      case 13: case 17: y -= bend * knee; x += (j == 13 ? 0.03 : -0.03) * knee; break;
      case 14: case 15: case 18: case 19: y -= 0.5 * bend * knee; break;
      default: break;
    }
    Joint& jt = s.joints[j];
    jt.u = std::round((p.cx + x * p.scale) * 100.0) / 100.0;
    jt.v = std::round((p.hip_y + y * p.scale) * 100.0) / 100.0;
    jt.x = std::round((jt.u - width / 2.0) / width * 200.0) / 100.0;
    jt.y = std::round((height / 2.0 - jt.v) / height * 200.0) / 100.0;
    jt.z = 3.0;
    jt.valid_2d = jt.u >= 0 && jt.u < width && jt.v >= 0 && jt.v < height;
    if (!jt.valid_2d) jt.u = jt.v = 0;
  }
  PoseFrame f;
  // A few clips lose tracking for one frame.
  if (!(clip_seed % 29 == 0 && frame == 1)) f.persons.push_back(std::move(s));
  return f;
}

namespace {

cv::Mat draw_frame(const PoseFrame& pose, int subject, int camera, int action, int width, int height) {
  const cv::Scalar bg(150 + 20 * subject % 100, 170 + 30 * camera % 80, 190 - 15 * subject % 90);
  cv::Mat img(height, width, CV_8UC3, bg);
  cv::rectangle(img, cv::Rect(0, height * 3 / 4, width, height / 4), bg * 0.7, cv::FILLED);
  cv::rectangle(img, cv::Rect(width / 12, height / 2, width / 5, height / 8), cv::Scalar(60, 90, 140), cv::FILLED);
  for (const auto& person : pose.persons) {
    auto pt = [&](int j) { return cv::Point(cvRound(person.joints[j].u), cvRound(person.joints[j].v)); };
    for (const auto& [a, b] : kBones) cv::line(img, pt(a), pt(b), cv::Scalar(40, 40, 40), 3, cv::LINE_AA);
    cv::circle(img, pt(3), std::max(4, height / 24), cv::Scalar(60, 80, 200), cv::FILLED, cv::LINE_AA);
    // A held object whose color depends on the action.
    cv::circle(img, pt(11), std::max(3, height / 40),
               cv::Scalar(30 + (action * 47) % 200, 30 + (action * 89) % 200, 30 + (action * 13) % 200), cv::FILLED);
  }
  return img;
}

}  // namespace

std::vector<ClipRecord> write_synthetic_corpus(const fs::path& dir, const ActionVocabulary& vocab,
                                               const SyntheticCorpusOptions& opt, VideoCodec& codec) {
  if (opt.subjects < 1 || opt.cameras < 1 || opt.clips_per_action < 1 || opt.min_frames < 1 ||
      opt.max_frames < opt.min_frames || opt.fps <= 0)
    throw PreconditionError("invalid synthetic corpus options");
  const auto actions = vocab.ids();
  std::vector<ClipRecord> records;
  std::vector<std::array<int, 4>> keys;
  for (int s = 1; s <= opt.subjects; ++s)
    for (int c = 1; c <= opt.cameras; ++c)
      for (int a : actions)
        for (int r = 1; r <= opt.clips_per_action; ++r) keys.push_back({s, c, a, r});
  records.resize(keys.size());

  parallel_for(keys.size(), 1, [&](std::size_t i) {
    const auto [s, c, a, r] = keys[i];
    const auto seed = derive_seed(opt.seed, i);
    Rng rng(seed ^ 0x5eedULL);
    const int n = rng.uniform_int(opt.min_frames, opt.max_frames);
    ClipRecord rec;
    rec.clip_id = clip_id(s, c, a, r);
    rec.subject_id = fmt::format("S{:03d}", s);
    rec.camera_id = fmt::format("C{:03d}", c);
    rec.action_id = a;
    rec.action_label = vocab.label(a);
    rec.video_path = "clips/" + rec.clip_id + codec.extension();
    rec.pose_path = "poses/" + rec.clip_id + ".json";
    rec.num_frames = n;
    rec.fps = opt.fps;

    PoseSequence poses;
    poses.frame_width = opt.width;
    poses.frame_height = opt.height;
    auto writer = codec.create(dir / rec.video_path, opt.fps, cv::Size(opt.width, opt.height));
    for (int t = 0; t < n; ++t) {
      poses.frames.push_back(synthetic_pose(a, t, seed, opt.width, opt.height));
      writer->write(draw_frame(poses.frames.back(), s, c, a, opt.width, opt.height));
    }
    writer->close();
    save_pose_json(poses, dir / *rec.pose_path);
    records[i] = std::move(rec);
  });
  write_corpus_manifest(dir / "corpus.jsonl", records);
  return records;
}

}  // namespace adlforge::curation
