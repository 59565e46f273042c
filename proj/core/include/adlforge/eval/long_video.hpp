#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "adlforge/annotate/llm_call.hpp"
#include "adlforge/annotate/prompts.hpp"
#include "adlforge/backends/client.hpp"
#include "adlforge/curation/codec.hpp"

namespace adlforge::eval {

struct ClipSpan {
  int index = 0;
  double start_s = 0;
  double end_s = 0;
  int start_frame = 0;
  int end_frame = 0;  // exclusive

  double seconds() const { return end_s - start_s; }
};

/// Consecutive spans of `clip_seconds` covering `duration_s`; the last span
/// may be shorter. Frame bounds use `fps` when it is positive.
std::vector<ClipSpan> split_duration(double duration_s, double clip_seconds, double fps = 0);
std::vector<ClipSpan> split_into_clips(int num_frames, double fps, double clip_seconds = 60);

/// Produces a free-text description of one clip of a long video.
class ClipDescriber {
 public:
  virtual ~ClipDescriber() = default;
  virtual std::string describe(const ClipSpan& clip) = 0;
};

/// Adapts a single-image captioner: describes the clip's middle frame.
class CaptionerClipDescriber : public ClipDescriber {
 public:
  CaptionerClipDescriber(curation::VideoCodec& codec, std::filesystem::path media, backends::BackendClient& captioner,
                         const annotate::PromptLibrary& prompts = annotate::PromptLibrary::builtin());
  std::string describe(const ClipSpan& clip) override;

 private:
  curation::VideoCodec& codec_;
  std::filesystem::path media_;
  backends::BackendClient& captioner_;
  std::string prompt_;
};

struct LongVideoDescription {
  std::vector<ClipSpan> clips;
  std::vector<std::string> clip_descriptions;  // empty for skipped clips
  std::string joined;
  std::string summary;
};

/// "In clip <k>: <description>" lines for the clips that produced text.
std::string join_clip_descriptions(const std::vector<std::string>& descriptions);

/// Describes each clip, skips failed ones, and summarizes the concatenation
/// with the dense-description prompt. Fails only when every clip fails.
LongVideoDescription describe_long_video(const std::vector<ClipSpan>& clips, ClipDescriber& describer,
                                         backends::BackendClient& chat,
                                         const annotate::PromptLibrary& prompts = annotate::PromptLibrary::builtin(),
                                         const annotate::RetryPolicy& policy = {});

}  // namespace adlforge::eval
