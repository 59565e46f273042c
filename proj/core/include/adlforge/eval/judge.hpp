#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "adlforge/annotate/llm_call.hpp"
#include "adlforge/annotate/prompts.hpp"
#include "adlforge/backends/client.hpp"

namespace adlforge::eval {

using annotate::JudgeMetric;
using annotate::kJudgeMetrics;

/// First standalone integer of the reply, accepted only in [1, 5].
std::optional<int> parse_judge_score(std::string_view reply);

inline double scale_judge_score(int raw) { return raw * 20.0; }

struct JudgeItem {
  std::string item_id;
  std::string generated;
  std::string reference;
};

/// Raw 1-5 score per metric; nullopt when the judge never gave one.
struct DescriptionJudgement {
  std::string item_id;
  std::array<std::optional<int>, 5> raw{};

  std::optional<double> scaled(JudgeMetric m) const;
};

/// One prompt per metric; an unusable reply is retried once, then the
/// metric is left empty for this item.
DescriptionJudgement judge_description(const JudgeItem& item, backends::BackendClient& chat,
                                       const annotate::PromptLibrary& prompts = annotate::PromptLibrary::builtin(),
                                       int attempts = 2);

struct JudgeCorpus {
  /// Mean scaled score per metric key ("CI", "DO", ...), over judged items.
  std::map<std::string, double> mean;
  std::map<std::string, int> excluded;
  int items = 0;
  std::vector<DescriptionJudgement> judgements;
};

inline constexpr double kMaxExcludedFrac = 0.2;

/// Aggregates per-item judgements. A metric missing for more than 20% of
/// items makes the corpus unusable (ValidationError).
JudgeCorpus aggregate_judgements(std::vector<DescriptionJudgement> judgements);

JudgeCorpus judge_corpus(const std::vector<JudgeItem>& items, backends::BackendClient& chat, int workers = 1,
                         const annotate::PromptLibrary& prompts = annotate::PromptLibrary::builtin());

nlohmann::json to_json(const JudgeCorpus& c);

}  // namespace adlforge::eval
