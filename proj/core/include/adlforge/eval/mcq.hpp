#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "adlforge/model/types.hpp"

namespace adlforge::eval {

enum class McqTask { AR, AF };

std::string_view to_string(McqTask t);
McqTask mcq_task_from_string(std::string_view s);

struct McqItem {
  std::string item_id;
  std::string video_id;
  std::string question;
  std::vector<std::string> options;
  int correct_index = 0;
  McqTask task = McqTask::AR;
  /// AF only: frames [0, prefix_end_frame) are visible.
  std::optional<int> prefix_end_frame;

  friend bool operator==(const McqItem&, const McqItem&) = default;
};

struct McqOptions {
  int k = 4;
  std::uint64_t seed = 7;
};

/// Case-folds, replaces punctuation with spaces and collapses whitespace.
std::string normalize_answer(std::string_view s);

/// AR: one ground-truth action of the video plus K-1 vocabulary distractors
/// that match none of the video's actions. AF: a visible prefix of m >= 1
/// segments; the answer is segment m's action; distractors and the answer
/// avoid every prefix action. Single-segment videos are skipped for AF.
std::vector<McqItem> build_mcq(const std::vector<StitchedVideo>& videos, const std::vector<std::string>& vocabulary,
                               McqTask task, const McqOptions& opt = {});

/// Throws ValidationError when an item breaks an McqItem invariant.
void validate_mcq_item(const McqItem& item);

/// Prompt text shown to an answering model (question + lettered options).
std::string render_mcq_prompt(const McqItem& item);

struct MatchResult {
  std::optional<int> chosen;
  std::string rule;  // "letter", "number", "exact", "substring", "ambiguous", "none"
};

/// Option letter/number, then exact normalized text, then unique substring.
MatchResult match_answer(const McqItem& item, std::string_view reply);

struct McqVerdict {
  std::string item_id;
  std::optional<int> chosen;
  bool correct = false;
  std::string rule;
};

struct McqReport {
  int total = 0;
  int correct = 0;
  double accuracy = 0.0;  // percent
  std::vector<McqVerdict> verdicts;
};

McqReport score_mcq(const std::vector<McqItem>& items, const std::vector<std::string>& answers);

nlohmann::json to_json(const McqItem& item);
McqItem mcq_item_from_json(const nlohmann::json& j);
nlohmann::json to_json(const McqReport& r);

void write_mcq(const std::filesystem::path& path, const std::vector<McqItem>& items);
std::vector<McqItem> load_mcq(const std::filesystem::path& path);
/// `answers.jsonl`: {"item_id", "reply"} per line.
std::map<std::string, std::string> load_answers(const std::filesystem::path& path);
/// Aligns keyed replies with `items`; a missing reply is an error.
std::vector<std::string> align_answers(const std::vector<McqItem>& items,
                                       const std::map<std::string, std::string>& replies);

}  // namespace adlforge::eval
