#include "adlforge/annotate/describe.hpp"

#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "adlforge/annotate/llm_parse.hpp"
#include "adlforge/model/error.hpp"

namespace adlforge::annotate {

using nlohmann::json;

int count_words(const std::string& text) {
  std::istringstream in(text);
  int n = 0;
  std::string w;
  while (in >> w) ++n;
  return n;
}

std::string dense_input_text(const CaptionDict& captions, const std::vector<std::string>& action_labels) {
  std::string out = serialize_mega_caption(captions);
  std::string actions;
  for (const auto& a : action_labels) actions += (actions.empty() ? "" : ", ") + a;
  out += "\nActions performed in order: " + actions;
  return out;
}

namespace {

std::function<std::vector<QaItem>(const std::string&)> mapping_parser(int expect, const std::string& what) {
  return [expect, what](const std::string& reply) {
    auto parsed = parse_llm_mapping(reply, expect);
    for (const auto& w : parsed.warnings) spdlog::warn("{}: {}", what, w);
    for (const auto& item : parsed.items)
      if (item.question.empty() || item.answer.empty()) throw ParseError(what + ": empty Q or A", reply);
    return parsed.items;
  };
}

}  // namespace

DenseDescription summarize_dense(const CaptionDict& captions, const std::vector<std::string>& action_labels,
                                 backends::BackendClient& chat, const PromptLibrary& prompts,
                                 const RetryPolicy& policy) {
  if (captions.entries.empty()) throw PreconditionError(fmt::format("{}: no captions to summarize", captions.video_id));
  const auto items = chat_structured<std::vector<QaItem>>(
      chat, prompts.dense_caption(dense_input_text(captions, action_labels)),
      mapping_parser(1, captions.video_id + " dense description"), policy);
  DenseDescription d{captions.video_id, items.front().question, items.front().answer, count_words(items.front().answer)};
  if (d.word_count > kDenseWordCap)
    spdlog::warn("{}: dense description has {} words (cap {})", d.video_id, d.word_count, kDenseWordCap);
  return d;
}

std::vector<QaPair> generate_qa(const StitchedVideo& video, const DenseDescription& dense, const CaptionDict& captions,
                                backends::BackendClient& chat, const PromptLibrary& prompts,
                                const RetryPolicy& policy) {
  if (dense.answer.find_first_not_of(" \t\r\n") == std::string::npos)
    throw PreconditionError(fmt::format("{}: dense description answer is empty", video.video_id));
  const auto mega = serialize_mega_caption(captions);
  std::vector<QaPair> out;
  out.push_back({video.video_id, dense.question, dense.answer, QaType::dense_description, QaSource::llm, std::nullopt});
  const auto summary = chat_structured<std::vector<QaItem>>(chat, prompts.qa_summary(dense.answer, mega),
                                                            mapping_parser(3, video.video_id + " summary QA"), policy);
  for (const auto& it : summary)
    out.push_back({video.video_id, it.question, it.answer, QaType::summary, QaSource::llm, std::nullopt});
  const auto detail = chat_structured<std::vector<QaItem>>(chat, prompts.qa_detail(dense.answer, mega),
                                                           mapping_parser(3, video.video_id + " detail QA"), policy);
  for (const auto& it : detail)
    out.push_back({video.video_id, it.question, it.answer, QaType::detail, QaSource::llm, std::nullopt});
  return out;
}

std::vector<QaPair> augment_with_context(const std::vector<QaPair>& pairs, const std::string& context,
                                         ContextKind kind) {
  if (context.empty()) throw PreconditionError("context must be non-empty");
  std::vector<QaPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    QaPair q = p;
    q.question = context + " " + p.question;
    q.qtype = kind == ContextKind::pose ? QaType::pose_context_augmented : QaType::object_context_augmented;
    q.context_prefix = context;
    out.push_back(std::move(q));
  }
  return out;
}

json to_json(const DenseDescription& d) {
  return {{"video_id", d.video_id}, {"question", d.question}, {"answer", d.answer}, {"word_count", d.word_count}};
}

DenseDescription dense_from_json(const json& j) {
  try {
    return {j.at("video_id").get<std::string>(), j.at("question").get<std::string>(),
            j.at("answer").get<std::string>(), j.at("word_count").get<int>()};
  } catch (const json::exception& e) {
    throw ManifestError(fmt::format("bad dense description record: {}", e.what()));
  }
}

}  // namespace adlforge::annotate
