#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adlforge/annotate/caption.hpp"
#include "adlforge/annotate/llm_call.hpp"
#include "adlforge/annotate/prompts.hpp"
#include "adlforge/backends/client.hpp"
#include "adlforge/model/types.hpp"

namespace adlforge::annotate {

inline constexpr int kDenseWordCap = 300;

struct DenseDescription {
  std::string video_id;
  std::string question;
  std::string answer;
  int word_count = 0;

  friend bool operator==(const DenseDescription&, const DenseDescription&) = default;
};

int count_words(const std::string& text);

/// Caption lines followed by the ground-truth action list; the text that
/// conditions the dense description on the true actions.
std::string dense_input_text(const CaptionDict& captions, const std::vector<std::string>& action_labels);

DenseDescription summarize_dense(const CaptionDict& captions, const std::vector<std::string>& action_labels,
                                 backends::BackendClient& chat,
                                 const PromptLibrary& prompts = PromptLibrary::builtin(),
                                 const RetryPolicy& policy = {});

/// 1 dense_description pair + 3 summary + 3 detail pairs.
std::vector<QaPair> generate_qa(const StitchedVideo& video, const DenseDescription& dense,
                                const CaptionDict& captions, backends::BackendClient& chat,
                                const PromptLibrary& prompts = PromptLibrary::builtin(),
                                const RetryPolicy& policy = {});

enum class ContextKind { pose, object };

/// Prefixes every question with `context` + " " and retags the pairs as
/// context-augmented. Answers are unchanged.
std::vector<QaPair> augment_with_context(const std::vector<QaPair>& pairs, const std::string& context,
                                         ContextKind kind);

nlohmann::json to_json(const DenseDescription& d);
DenseDescription dense_from_json(const nlohmann::json& j);

}  // namespace adlforge::annotate
