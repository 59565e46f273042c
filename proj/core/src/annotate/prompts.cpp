#include "adlforge/annotate/prompts.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "adlforge/model/assets.hpp"
#include "adlforge/model/error.hpp"

namespace adlforge::annotate {

namespace fs = std::filesystem;
using backends::ChatMessage;

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

std::string_view metric_key(JudgeMetric m) {
  switch (m) {
    case JudgeMetric::ci: return "CI";
    case JudgeMetric::do_: return "DO";
    case JudgeMetric::cu: return "CU";
    case JudgeMetric::tu: return "TU";
    case JudgeMetric::con: return "Con";
  }
  return "";
}

std::string_view metric_name(JudgeMetric m) {
  switch (m) {
    case JudgeMetric::ci: return "Correctness of Information";
    case JudgeMetric::do_: return "Detail Orientation";
    case JudgeMetric::cu: return "Contextual Understanding";
    case JudgeMetric::tu: return "Temporal Understanding";
    case JudgeMetric::con: return "Consistency";
  }
  return "";
}

namespace {

constexpr std::string_view kPrefix = "prompts/";
constexpr std::string_view kSuffix = ".txt";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const PromptLibrary& PromptLibrary::builtin() {
  static const PromptLibrary lib = [] {
    PromptLibrary l;
    for (const auto& name : builtin_asset_names()) {
      if (name.rfind(kPrefix, 0) != 0 || name.size() <= kPrefix.size() + kSuffix.size()) continue;
      const auto key = name.substr(kPrefix.size(), name.size() - kPrefix.size() - kSuffix.size());
      l.texts_[key] = std::string(builtin_asset(name));
    }
    return l;
  }();
  return lib;
}

PromptLibrary PromptLibrary::with_overrides(const fs::path& dir) {
  PromptLibrary l = builtin();
  if (!fs::is_directory(dir)) throw PreconditionError(fmt::format("prompt directory {} not found", dir.string()));
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != kSuffix) continue;
    const auto key = e.path().stem().string();
    if (!l.texts_.count(key))
      throw PreconditionError(fmt::format("prompt override {} does not name a known template", e.path().string()));
    l.texts_[key] = slurp(e.path());
  }
  return l;
}

const std::string& PromptLibrary::text(const std::string& name) const {
  const auto it = texts_.find(name);
  if (it == texts_.end()) throw PreconditionError(fmt::format("unknown prompt template '{}'", name));
  return it->second;
}

std::vector<std::string> PromptLibrary::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : texts_) out.push_back(k);
  return out;
}

std::vector<std::string> PromptLibrary::caption_prompts() const { return {text("caption_1"), text("caption_2")}; }
std::string PromptLibrary::clip_describe_prompt() const { return text("clip_describe"); }
std::string PromptLibrary::reprompt_suffix() const { return text("reprompt_suffix"); }

std::vector<ChatMessage> PromptLibrary::dense_caption(const std::string& mega_caption) const {
  return {{"system", text("dense_caption.system")},
          {"user", render_template(text("dense_caption.user"), {{"mega_caption", mega_caption}})}};
}

std::vector<ChatMessage> PromptLibrary::qa_summary(const std::string& caption, const std::string& mega_caption) const {
  return {{"system", text("qa_summary.system")},
          {"user", render_template(text("qa_summary.user"), {{"caption", caption}, {"mega_caption", mega_caption}})}};
}

std::vector<ChatMessage> PromptLibrary::qa_detail(const std::string& caption, const std::string& mega_caption) const {
  return {{"system", text("qa_detail.system")},
          {"user", render_template(text("qa_detail.user"), {{"caption", caption}, {"mega_caption", mega_caption}})}};
}

std::string PromptLibrary::pose_description(const std::string& pose_str) const {
  return render_template(text("pose_description.user"), {{"pose_str", pose_str}});
}

std::string PromptLibrary::relevant_objects(const std::string& action_label, const std::string& found_objects) const {
  return render_template(text("relevant_objects.user"),
                         {{"action_label", action_label}, {"found_objects", found_objects}});
}

std::string PromptLibrary::pose_qa_describe(const std::string& action_label, const std::string& pose_str) const {
  return render_template(text("pose_qa_describe.user"), {{"action_label", action_label}, {"pose_str", pose_str}});
}

std::string PromptLibrary::pose_qa_generate(const std::string& description) const {
  return render_template(text("pose_qa_generate.user"), {{"caption", description}});
}

std::vector<ChatMessage> PromptLibrary::judge(JudgeMetric metric, const std::string& reference,
                                              const std::string& generated) const {
  std::string key = "judge_";
  for (char c : metric_key(metric)) key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  key += ".user";
  return {{"system", text("judge.system")},
          {"user", render_template(text(key), {{"reference", reference}, {"generated", generated}})}};
}

std::string PromptLibrary::composite_sequences(const std::string& action_list, int count, int min_len,
                                               int max_len) const {
  return render_template(text("composite_sequences.user"), {{"action_list", action_list},
                                                            {"count", std::to_string(count)},
                                                            {"min_len", std::to_string(min_len)},
                                                            {"max_len", std::to_string(max_len)}});
}

}  // namespace adlforge::annotate
