#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "adlforge/backends/request.hpp"

namespace adlforge::annotate {

/// Replaces every `{name}` token whose name is a key of `values`. Unknown
/// brace groups are copied unchanged and substituted text is never rescanned.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// The five judged description qualities.
enum class JudgeMetric { ci, do_, cu, tu, con };
inline constexpr JudgeMetric kJudgeMetrics[] = {JudgeMetric::ci, JudgeMetric::do_, JudgeMetric::cu,
                                                JudgeMetric::tu, JudgeMetric::con};
std::string_view metric_key(JudgeMetric m);   // "CI", "DO", ...
std::string_view metric_name(JudgeMetric m);  // "Correctness of Information", ...

/// Versioned prompt templates. Built-in texts can be overridden file by file
/// from a directory holding `<name>.txt` files.
class PromptLibrary {
 public:
  static const PromptLibrary& builtin();
  static PromptLibrary with_overrides(const std::filesystem::path& dir);

  static constexpr std::string_view kVersion = "prompts-v1";

  /// Raw template by name, e.g. "dense_caption.user".
  const std::string& text(const std::string& name) const;
  std::vector<std::string> names() const;

  std::vector<std::string> caption_prompts() const;
  std::string clip_describe_prompt() const;
  std::string reprompt_suffix() const;

  std::vector<backends::ChatMessage> dense_caption(const std::string& mega_caption) const;
  std::vector<backends::ChatMessage> qa_summary(const std::string& caption, const std::string& mega_caption) const;
  std::vector<backends::ChatMessage> qa_detail(const std::string& caption, const std::string& mega_caption) const;
  std::string pose_description(const std::string& pose_str) const;
  std::string relevant_objects(const std::string& action_label, const std::string& found_objects) const;
  std::string pose_qa_describe(const std::string& action_label, const std::string& pose_str) const;
  std::string pose_qa_generate(const std::string& description) const;
  std::vector<backends::ChatMessage> judge(JudgeMetric metric, const std::string& reference,
                                           const std::string& generated) const;
  std::string composite_sequences(const std::string& action_list, int count, int min_len, int max_len) const;

 private:
  std::map<std::string, std::string> texts_;
};

}  // namespace adlforge::annotate
