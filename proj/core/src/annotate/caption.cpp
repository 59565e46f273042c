#include "adlforge/annotate/caption.hpp"

#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "adlforge/annotate/prompts.hpp"
#include "adlforge/model/error.hpp"

namespace adlforge::annotate {

using nlohmann::json;

std::vector<int> sample_frames(int num_frames, double fps, double target_fps) {
  if (num_frames < 1 || !(fps > 0) || !(target_fps > 0))
    throw PreconditionError("sample_frames needs num_frames >= 1, fps > 0 and target_fps > 0");
  const double step = fps / target_fps;
  std::vector<int> out;
  for (long long k = 0;; ++k) {
    const long long idx = std::llround(static_cast<double>(k) * step);
    if (idx >= num_frames) break;
    if (out.empty() || idx > out.back()) out.push_back(static_cast<int>(idx));
  }
  return out;
}

CaptionDict caption_frames(const std::string& video_id, const std::vector<int>& indices,
                           const std::vector<cv::Mat>& frames, backends::BackendClient& captioner,
                           const CaptionOptions& opt) {
  if (indices.size() != frames.size()) throw PreconditionError("frame/index count mismatch");
  const auto prompts = opt.prompts.empty() ? PromptLibrary::builtin().caption_prompts() : opt.prompts;
  CaptionDict out;
  out.video_id = video_id;
  out.sample_rate_fps = opt.target_fps;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const int idx = indices[i];
    try {
      const auto image = curation::encode_jpeg(frames[i], opt.jpeg_quality);
      std::string joined;
      for (std::size_t p = 0; p < prompts.size(); ++p) {
        auto reply = captioner.caption(image, prompts[p], idx);
        if (reply.find_first_not_of(" \t\r\n") == std::string::npos)
          throw backends::ResponseSchemaError("empty caption");
        if (p) joined += opt.joiner;
        joined += reply;
      }
      out.entries.emplace(idx, std::move(joined));
    } catch (const backends::BackendError& e) {
      spdlog::warn("{}: captioning frame {} failed: {}", video_id, idx, e.what());
      out.failed_frames.push_back(idx);
    }
  }
  const double failed = static_cast<double>(out.failed_frames.size());
  if (out.entries.empty() || failed > opt.max_failure_frac * static_cast<double>(indices.size()))
    throw Error(fmt::format("{}: captioning failed on {} of {} sampled frames", video_id, out.failed_frames.size(),
                            indices.size()));
  return out;
}

CaptionDict caption_video(const StitchedVideo& video, const std::filesystem::path& media, curation::VideoCodec& codec,
                          backends::BackendClient& captioner, const CaptionOptions& opt) {
  const auto indices = sample_frames(video.total_frames(), video.fps, opt.target_fps);
  const auto frames = curation::read_frames(codec, media, indices);
  return caption_frames(video.video_id, indices, frames, captioner, opt);
}

std::string serialize_mega_caption(const CaptionDict& captions) {
  std::string out;
  for (const auto& [idx, text] : captions.entries) {
    if (!out.empty()) out += '\n';
    out += fmt::format("In frame {}: {}", idx, text);
  }
  return out;
}

json to_json(const CaptionDict& c) {
  json entries = json::array();
  for (const auto& [idx, text] : c.entries) entries.push_back({{"frame_index", idx}, {"caption", text}});
  return {{"video_id", c.video_id},
          {"sample_rate_fps", c.sample_rate_fps},
          {"entries", std::move(entries)},
          {"failed_frames", c.failed_frames}};
}

CaptionDict caption_dict_from_json(const json& j) {
  try {
    CaptionDict c;
    c.video_id = j.at("video_id").get<std::string>();
    c.sample_rate_fps = j.at("sample_rate_fps").get<double>();
    int prev = -1;
    for (const auto& e : j.at("entries")) {
      const int idx = e.at("frame_index").get<int>();
      if (idx <= prev) throw ManifestError(fmt::format("{}: caption frame indices not increasing", c.video_id));
      prev = idx;
      auto text = e.at("caption").get<std::string>();
      if (text.empty()) throw ManifestError(fmt::format("{}: empty caption for frame {}", c.video_id, idx));
      c.entries.emplace(idx, std::move(text));
    }
    c.failed_frames = j.value("failed_frames", std::vector<int>{});
    return c;
  } catch (const json::exception& e) {
    throw ManifestError(fmt::format("bad caption record: {}", e.what()));
  }
}

}  // namespace adlforge::annotate
