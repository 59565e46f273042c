#include "adlforge/eval/long_video.hpp"

#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "adlforge/annotate/llm_parse.hpp"
#include "adlforge/model/error.hpp"

namespace adlforge::eval {

std::vector<ClipSpan> split_duration(double duration_s, double clip_seconds, double fps) {
  if (!(clip_seconds > 0)) throw PreconditionError("clip_seconds must be > 0");
  if (!(duration_s >= 0)) throw PreconditionError("duration must be >= 0");
  std::vector<ClipSpan> out;
  // Tolerate float noise so 120 s / 60 s gives two clips, not a sliver third.
  const double eps = 1e-9 * std::max(1.0, duration_s);
  for (int k = 0;; ++k) {
    const double start = k * clip_seconds;
    if (start >= duration_s - eps) break;
    ClipSpan c;
    c.index = k;
    c.start_s = start;
    c.end_s = std::min(start + clip_seconds, duration_s);
    if (fps > 0) {
      c.start_frame = static_cast<int>(std::llround(c.start_s * fps));
      c.end_frame = static_cast<int>(std::llround(c.end_s * fps));
    }
    out.push_back(c);
  }
  return out;
}

std::vector<ClipSpan> split_into_clips(int num_frames, double fps, double clip_seconds) {
  if (!(fps > 0)) throw PreconditionError("fps must be > 0");
  if (num_frames < 0) throw PreconditionError("negative frame count");
  auto clips = split_duration(num_frames / fps, clip_seconds, fps);
  if (!clips.empty()) clips.back().end_frame = num_frames;
  return clips;
}

CaptionerClipDescriber::CaptionerClipDescriber(curation::VideoCodec& codec, std::filesystem::path media,
                                               backends::BackendClient& captioner,
                                               const annotate::PromptLibrary& prompts)
    : codec_(codec), media_(std::move(media)), captioner_(captioner), prompt_(prompts.clip_describe_prompt()) {}

std::string CaptionerClipDescriber::describe(const ClipSpan& clip) {
  if (clip.end_frame <= clip.start_frame) throw PreconditionError(fmt::format("clip {} has no frames", clip.index));
  const int mid = clip.start_frame + (clip.end_frame - clip.start_frame) / 2;
  const auto frames = curation::read_frames(codec_, media_, {mid});
  return captioner_.caption(curation::encode_jpeg(frames.front()), prompt_, mid);
}

std::string join_clip_descriptions(const std::vector<std::string>& descriptions) {
  std::string out;
  for (std::size_t k = 0; k < descriptions.size(); ++k) {
    if (descriptions[k].empty()) continue;
    if (!out.empty()) out += '\n';
    out += fmt::format("In clip {}: {}", k, descriptions[k]);
  }
  return out;
}

LongVideoDescription describe_long_video(const std::vector<ClipSpan>& clips, ClipDescriber& describer,
                                         backends::BackendClient& chat, const annotate::PromptLibrary& prompts,
                                         const annotate::RetryPolicy& policy) {
  if (clips.empty()) throw PreconditionError("long video has no clips");
  LongVideoDescription out;
  out.clips = clips;
  int ok = 0;
  for (const auto& c : clips) {
    std::string text;
    try {
      text = describer.describe(c);
      if (text.empty()) spdlog::warn("clip {}: empty description, skipped", c.index);
    } catch (const std::exception& e) {
      spdlog::warn("clip {}: description failed, skipped: {}", c.index, e.what());
    }
    ok += !text.empty();
    out.clip_descriptions.push_back(std::move(text));
  }
  if (ok == 0) throw Error(fmt::format("all {} clips failed to produce a description", clips.size()));
  out.joined = join_clip_descriptions(out.clip_descriptions);
  const auto items = annotate::chat_structured<std::vector<annotate::QaItem>>(
      chat, prompts.dense_caption(out.joined),
      [](const std::string& reply) {
        auto parsed = annotate::parse_llm_mapping(reply, 1);
        if (parsed.items.front().answer.empty()) throw ParseError("empty summary", reply);
        return parsed.items;
      },
      policy);
  out.summary = items.front().answer;
  return out;
}

}  // namespace adlforge::eval
