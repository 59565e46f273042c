#include "adlforge/curation/stitch.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "adlforge/model/error.hpp"
#include "adlforge/model/hashing.hpp"
#include "adlforge/model/manifest.hpp"
#include "adlforge/model/pose_io.hpp"
#include "adlforge/model/rng.hpp"

namespace adlforge::curation {

namespace fs = std::filesystem;

std::string video_id(int index) { return fmt::format("V{:05d}", index); }

namespace {

using GroupKey = std::pair<std::string, std::string>;  // subject, camera
using Group = std::map<int, std::vector<const ClipRecord*>>;  // action -> clips

}  // namespace

std::vector<StitchedVideo> assign_clips(const std::vector<CompositeSequence>& sequences,
                                        const std::vector<ClipRecord>& corpus, const StitchOptions& opt) {
  if (sequences.empty()) throw PreconditionError("no composite sequences to stitch");
  if (opt.target_count < 0) throw PreconditionError("target_count must be >= 0");
  std::map<GroupKey, Group> groups;
  for (const auto& c : corpus) groups[{c.subject_id, c.camera_id}][c.action_id].push_back(&c);

  std::vector<StitchedVideo> out;
  out.reserve(opt.target_count);
  for (int v = 0; v < opt.target_count; ++v) {
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(v)));
    std::set<std::string> uncovered;
    bool done = false;
    for (int attempt = 0; attempt < opt.max_attempts && !done; ++attempt) {
      const auto& seq = sequences[rng.uniform_index(sequences.size())];
      std::map<int, int> need;
      for (int a : seq.action_ids) ++need[a];
      std::vector<const std::pair<const GroupKey, Group>*> eligible;
      for (const auto& g : groups) {
        const bool ok = std::all_of(need.begin(), need.end(), [&](const auto& kv) {
          auto it = g.second.find(kv.first);
          return it != g.second.end() && static_cast<int>(it->second.size()) >= kv.second;
        });
        if (ok) eligible.push_back(&g);
      }
      if (eligible.empty()) {
        spdlog::warn("{}: no subject/camera group covers {}; resampling", video_id(v), seq.sequence_id);
        uncovered.insert(seq.sequence_id);
        continue;
      }
      const auto& [key, group] = *eligible[rng.uniform_index(eligible.size())];

      StitchedVideo video;
      video.video_id = video_id(v);
      video.subject_id = key.first;
      video.camera_id = key.second;
      video.sequence_id = seq.sequence_id;
      std::map<int, std::vector<const ClipRecord*>> pool;
      int frame = 0;
      for (int a : seq.action_ids) {
        auto& candidates = pool.try_emplace(a, group.at(a)).first->second;
        const auto pick = rng.uniform_index(candidates.size());
        const ClipRecord* clip = candidates[pick];
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
        video.segments.push_back({clip->clip_id, clip->action_id, clip->action_label, frame, frame + clip->num_frames});
        frame += clip->num_frames;
        video.fps = clip->fps;
      }
      out.push_back(std::move(video));
      done = true;
    }
    if (!done) {
      std::string report;
      for (const auto& s : uncovered) report += (report.empty() ? "" : ", ") + s;
      throw ValidationError(fmt::format(
          "stitched {} of {} videos; {} failed after {} attempts. Sequences without a covering "
          "subject/camera group: [{}]; corpus has {} group(s) over {} clip(s)",
          out.size(), opt.target_count, video_id(v), opt.max_attempts, report, groups.size(), corpus.size()));
    }
  }
  return out;
}

std::vector<const ClipRecord*> segment_clips(const StitchedVideo& video,
                                             const std::map<std::string, const ClipRecord*>& by_id) {
  std::vector<const ClipRecord*> out;
  for (const auto& s : video.segments) {
    auto it = by_id.find(s.clip_id);
    if (it == by_id.end())
      throw ManifestError(fmt::format("{}: clip {} is not in the corpus", video.video_id, s.clip_id));
    out.push_back(it->second);
  }
  return out;
}

void render_stitched(StitchedVideo& video, const std::vector<const ClipRecord*>& clips, const fs::path& corpus_manifest,
                     VideoCodec& codec, const RenderOptions& opt, const fs::path& out_path) {
  if (clips.size() != video.segments.size()) throw PreconditionError("clip list does not match segments");

  std::vector<PoseSequence> poses;
  poses.reserve(clips.size());
  for (const auto* c : clips) {
    if (!c->pose_path) throw PreconditionError(fmt::format("{}: clip {} has no pose sidecar", video.video_id, c->clip_id));
    poses.push_back(load_pose_sequence(resolve_relative(corpus_manifest, *c->pose_path)));
  }
  std::vector<const PoseSequence*> ptrs;
  for (const auto& p : poses) ptrs.push_back(&p);
  const CropBox box = crop_union(ptrs, opt.crop);
  const Letterbox video_lb = make_letterbox(box, opt.out_w, opt.out_h);

  auto writer = codec.create(out_path, video.fps, cv::Size(opt.out_w, opt.out_h));
  for (std::size_t k = 0; k < clips.size(); ++k) {
    const auto* c = clips[k];
    auto reader = codec.open(resolve_relative(corpus_manifest, c->video_path));
    std::vector<std::optional<CropBox>> per_frame;
    if (opt.mode == CropMode::per_frame) per_frame = crop_per_frame(poses[k], opt.crop);
    cv::Mat frame, last;
    int written = 0;
    for (; written < c->num_frames; ++written) {
      if (!reader->read(frame)) break;
      if (frame.cols != box.frame_w || frame.rows != box.frame_h)
        throw MediaError(fmt::format("{}: clip {} is {}x{} but its poses declare {}x{}", video.video_id, c->clip_id,
                                     frame.cols, frame.rows, box.frame_w, box.frame_h));
      const Letterbox& lb = (opt.mode == CropMode::per_frame && written < static_cast<int>(per_frame.size()) &&
                             per_frame[written])
                                ? make_letterbox(*per_frame[written], opt.out_w, opt.out_h)
                                : video_lb;
      last = apply_letterbox(frame, lb);
      writer->write(last);
    }
    if (written == 0) throw MediaError(fmt::format("{}: clip {} has no decodable frames", video.video_id, c->clip_id));
    if (written < c->num_frames) {
      spdlog::warn("{}: clip {} decoded {} of {} frames; repeating the last frame", video.video_id, c->clip_id,
                   written, c->num_frames);
      for (; written < c->num_frames; ++written) writer->write(last);
    }
  }
  writer->close();
  video.crop_box = box;
}

}  // namespace adlforge::curation
