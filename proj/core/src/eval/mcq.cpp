#include "adlforge/eval/mcq.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "adlforge/model/error.hpp"
#include "adlforge/model/hashing.hpp"
#include "adlforge/model/manifest.hpp"
#include "adlforge/model/rng.hpp"

namespace adlforge::eval {

using nlohmann::json;

std::string_view to_string(McqTask t) { return t == McqTask::AR ? "AR" : "AF"; }

McqTask mcq_task_from_string(std::string_view s) {
  if (s == "AR" || s == "ar") return McqTask::AR;
  if (s == "AF" || s == "af") return McqTask::AF;
  throw PreconditionError(fmt::format("unknown MCQ task '{}'", s));
}

std::string normalize_answer(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || u >= 0x80) {
      if (space && !out.empty()) out += ' ';
      space = false;
      out += static_cast<char>(std::tolower(u));
    } else {
      space = true;
    }
  }
  return out;
}

namespace {

// Distinct vocabulary labels (by normalized text) not in `exclude`.
std::vector<std::string> candidate_pool(const std::vector<std::string>& vocabulary, const std::set<std::string>& exclude) {
  std::vector<std::string> pool;
  std::set<std::string> seen = exclude;
  for (const auto& v : vocabulary)
    if (seen.insert(normalize_answer(v)).second) pool.push_back(v);
  return pool;
}

McqItem make_item(const std::string& id, const std::string& video_id, std::string question, const std::string& answer,
                  std::vector<std::string> pool, int k, Rng& rng, McqTask task) {
  if (static_cast<int>(pool.size()) < k - 1)
    throw PreconditionError(fmt::format("{}: only {} distractor labels available for K={}", id, pool.size(), k));
  // Partial Fisher-Yates: the first k-1 entries become the distractors.
  for (int i = 0; i < k - 1; ++i) {
    const auto j = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  std::vector<std::string> options(pool.begin(), pool.begin() + (k - 1));
  const int correct = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(k)));
  options.insert(options.begin() + correct, answer);
  return {id, video_id, std::move(question), std::move(options), correct, task, std::nullopt};
}

}  // namespace

std::vector<McqItem> build_mcq(const std::vector<StitchedVideo>& videos, const std::vector<std::string>& vocabulary,
                               McqTask task, const McqOptions& opt) {
  if (opt.k < 2) throw PreconditionError("K must be >= 2");
  {
    std::set<std::string> distinct;
    for (const auto& v : vocabulary) distinct.insert(normalize_answer(v));
    if (static_cast<int>(distinct.size()) < opt.k)
      throw PreconditionError(fmt::format("vocabulary has {} distinct labels, fewer than K={}", distinct.size(), opt.k));
  }
  std::vector<McqItem> out;
  for (std::size_t vi = 0; vi < videos.size(); ++vi) {
    const auto& v = videos[vi];
    if (v.segments.empty()) continue;
    Rng rng(derive_seed(opt.seed ^ (task == McqTask::AR ? 0xA5ULL : 0xAFULL), fnv1a64(v.video_id)));
    const std::string id = fmt::format("{}-{}", v.video_id, to_string(task));
    if (task == McqTask::AR) {
      std::set<std::string> in_video;
      for (const auto& s : v.segments) in_video.insert(normalize_answer(s.action_label));
      const auto& answer = v.segments[rng.uniform_index(v.segments.size())].action_label;
      out.push_back(make_item(id, v.video_id, "Which of the following actions does the person perform in the video?",
                              answer, candidate_pool(vocabulary, in_video), opt.k, rng, task));
      continue;
    }
    if (v.segments.size() < 2) {
      spdlog::warn("{}: single-segment video skipped for action forecasting", v.video_id);
      continue;
    }
    // m = number of visible segments; the answer must not already be visible.
    std::vector<int> valid_m;
    for (int m = 1; m < static_cast<int>(v.segments.size()); ++m) {
      const auto next = normalize_answer(v.segments[m].action_label);
      bool seen = false;
      for (int p = 0; p < m; ++p) seen = seen || normalize_answer(v.segments[p].action_label) == next;
      if (!seen) valid_m.push_back(m);
    }
    if (valid_m.empty()) {
      spdlog::warn("{}: every next action already occurs in its prefix; skipped for forecasting", v.video_id);
      continue;
    }
    const int m = valid_m[rng.uniform_index(valid_m.size())];
    std::set<std::string> exclude;
    for (int p = 0; p <= m; ++p) exclude.insert(normalize_answer(v.segments[p].action_label));
    auto item = make_item(id, v.video_id,
                          fmt::format("The video shows the first {} action(s) the person performs. Which action does "
                                      "the person perform next?",
                                      m),
                          v.segments[m].action_label, candidate_pool(vocabulary, exclude), opt.k, rng, task);
    item.prefix_end_frame = v.segments[m - 1].end_frame;
    out.push_back(std::move(item));
  }
  return out;
}

void validate_mcq_item(const McqItem& item) {
  if (item.options.size() < 2) throw ValidationError(fmt::format("{}: fewer than 2 options", item.item_id));
  if (item.correct_index < 0 || item.correct_index >= static_cast<int>(item.options.size()))
    throw ValidationError(fmt::format("{}: correct_index out of range", item.item_id));
  std::set<std::string> seen;
  for (const auto& o : item.options)
    if (!seen.insert(normalize_answer(o)).second)
      throw ValidationError(fmt::format("{}: duplicate option '{}'", item.item_id, o));
  if (item.task == McqTask::AF && !item.prefix_end_frame)
    throw ValidationError(fmt::format("{}: forecasting item without prefix boundary", item.item_id));
}

std::string render_mcq_prompt(const McqItem& item) {
  std::string out = item.question;
  for (std::size_t i = 0; i < item.options.size(); ++i)
    out += fmt::format("\n({}) {}", static_cast<char>('A' + i), item.options[i]);
  out += "\nAnswer with the letter of the correct option.";
  return out;
}

MatchResult match_answer(const McqItem& item, std::string_view reply) {
  const int k = static_cast<int>(item.options.size());
  const std::string raw(reply);
  const auto norm = normalize_answer(raw);

  auto letter_index = [&](char c) -> std::optional<int> {
    const int i = std::tolower(static_cast<unsigned char>(c)) - 'a';
    return i >= 0 && i < k ? std::optional<int>(i) : std::nullopt;
  };
  auto number_index = [&](const std::string& s) -> std::optional<int> {
    const int i = std::stoi(s) - 1;
    return i >= 0 && i < k ? std::optional<int>(i) : std::nullopt;
  };

  // Bare letter / number reply.
  if (norm.size() == 1 && std::isalpha(static_cast<unsigned char>(norm[0])))
    if (auto i = letter_index(norm[0])) return {i, "letter"};
  if (!norm.empty() && norm.size() <= 2 && std::all_of(norm.begin(), norm.end(), ::isdigit))
    if (auto i = number_index(norm)) return {i, "number"};

  static const std::regex paren(R"(\(\s*([A-Za-z])\s*\))");
  static const std::regex lead_letter(R"(^\s*([A-Za-z])\s*[\).:](\s|$))");
  static const std::regex lead_number(R"(^\s*(\d{1,2})\s*[\).:](\s|$))");
  static const std::regex phrase(R"((?:answer|option|choice)\s*(?:is|:)?\s*[\(\[]?([A-Za-z]|\d{1,2})[\)\]]?(?![A-Za-z0-9]))",
                                 std::regex::icase);
  std::smatch m;
  if (std::regex_search(raw, m, paren))
    if (auto i = letter_index(m[1].str()[0])) return {i, "letter"};
  if (std::regex_search(raw, m, lead_letter))
    if (auto i = letter_index(m[1].str()[0])) return {i, "letter"};
  if (std::regex_search(raw, m, lead_number))
    if (auto i = number_index(m[1].str())) return {i, "number"};
  if (std::regex_search(raw, m, phrase)) {
    const auto tok = m[1].str();
    if (std::isdigit(static_cast<unsigned char>(tok[0]))) {
      if (auto i = number_index(tok)) return {i, "number"};
    } else if (auto i = letter_index(tok[0])) {
      return {i, "letter"};
    }
  }

  for (int i = 0; i < k; ++i)
    if (norm == normalize_answer(item.options[i])) return {i, "exact"};

  std::optional<int> hit;
  int hits = 0;
  for (int i = 0; i < k; ++i) {
    const auto opt = normalize_answer(item.options[i]);
    if (opt.empty()) continue;
    // Whole-word containment.
    const auto padded = " " + norm + " ";
    if (padded.find(" " + opt + " ") != std::string::npos) {
      hit = i;
      ++hits;
    }
  }
  if (hits == 1) return {hit, "substring"};
  return {std::nullopt, hits > 1 ? "ambiguous" : "none"};
}

McqReport score_mcq(const std::vector<McqItem>& items, const std::vector<std::string>& answers) {
  if (items.size() != answers.size())
    throw PreconditionError(fmt::format("{} answers for {} items", answers.size(), items.size()));
  McqReport r;
  r.total = static_cast<int>(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto m = match_answer(items[i], answers[i]);
    McqVerdict v{items[i].item_id, m.chosen, m.chosen && *m.chosen == items[i].correct_index, m.rule};
    if (!m.chosen) spdlog::debug("{}: reply not matched to an option ({})", items[i].item_id, m.rule);
    r.correct += v.correct;
    r.verdicts.push_back(std::move(v));
  }
  r.accuracy = r.total ? 100.0 * r.correct / r.total : 0.0;
  return r;
}

json to_json(const McqItem& item) {
  json j = {{"item_id", item.item_id},   {"video_id", item.video_id},           {"question", item.question},
            {"options", item.options},   {"correct_index", item.correct_index}, {"task", to_string(item.task)}};
  j["prefix_end_frame"] = item.prefix_end_frame ? json(*item.prefix_end_frame) : json(nullptr);
  return j;
}

McqItem mcq_item_from_json(const json& j) {
  try {
    McqItem it;
    it.item_id = j.at("item_id").get<std::string>();
    it.video_id = j.at("video_id").get<std::string>();
    it.question = j.at("question").get<std::string>();
    it.options = j.at("options").get<std::vector<std::string>>();
    it.correct_index = j.at("correct_index").get<int>();
    it.task = mcq_task_from_string(j.at("task").get<std::string>());
    if (j.contains("prefix_end_frame") && !j["prefix_end_frame"].is_null())
      it.prefix_end_frame = j["prefix_end_frame"].get<int>();
    return it;
  } catch (const json::exception& e) {
    throw ManifestError(fmt::format("bad MCQ item: {}", e.what()));
  }
}

json to_json(const McqReport& r) {
  json verdicts = json::array();
  for (const auto& v : r.verdicts)
    verdicts.push_back({{"item_id", v.item_id},
                        {"chosen", v.chosen ? json(*v.chosen) : json(nullptr)},
                        {"correct", v.correct},
                        {"rule", v.rule}});
  return {{"total", r.total}, {"correct", r.correct}, {"accuracy", r.accuracy}, {"verdicts", std::move(verdicts)}};
}

void write_mcq(const std::filesystem::path& path, const std::vector<McqItem>& items) {
  std::vector<json> rows;
  for (const auto& it : items) rows.push_back(to_json(it));
  write_jsonl(path, rows);
}

std::vector<McqItem> load_mcq(const std::filesystem::path& path) {
  std::vector<McqItem> out;
  for_each_jsonl(path, [&](int line, const json& j) {
    try {
      out.push_back(mcq_item_from_json(j));
      validate_mcq_item(out.back());
    } catch (const Error& e) {
      throw ManifestError(fmt::format("line {}: {}", line, e.what()));
    }
  });
  return out;
}

std::map<std::string, std::string> load_answers(const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  for_each_jsonl(path, [&](int line, const json& j) {
    if (!j.contains("item_id") || !j.contains("reply") || !j["reply"].is_string())
      throw ManifestError(fmt::format("line {}: answer needs item_id and reply", line));
    if (!out.emplace(j["item_id"].get<std::string>(), j["reply"].get<std::string>()).second)
      throw ManifestError(fmt::format("line {}: duplicate answer for {}", line, j["item_id"].get<std::string>()));
  });
  return out;
}

std::vector<std::string> align_answers(const std::vector<McqItem>& items, const std::map<std::string, std::string>& replies) {
  std::vector<std::string> out;
  for (const auto& it : items) {
    const auto r = replies.find(it.item_id);
    if (r == replies.end()) throw PreconditionError(fmt::format("no answer for item {}", it.item_id));
    out.push_back(r->second);
  }
  return out;
}

}  // namespace adlforge::eval
