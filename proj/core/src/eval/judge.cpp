#include "adlforge/eval/judge.hpp"

#include <regex>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "adlforge/model/error.hpp"
#include "adlforge/model/parallel.hpp"

namespace adlforge::eval {

using nlohmann::json;

std::optional<int> parse_judge_score(std::string_view reply) {
  static const std::regex num(R"((^|[^0-9.])(-?\d+(?:\.\d+)?)(?![0-9]))");
  const std::string s(reply);
  std::smatch m;
  if (!std::regex_search(s, m, num)) return std::nullopt;
  const auto tok = m[2].str();
  if (tok.find('.') != std::string::npos || tok[0] == '-') return std::nullopt;
  const int v = std::stoi(tok);
  return v >= 1 && v <= 5 ? std::optional<int>(v) : std::nullopt;
}

std::optional<double> DescriptionJudgement::scaled(JudgeMetric m) const {
  const auto& r = raw[static_cast<std::size_t>(m)];
  return r ? std::optional<double>(scale_judge_score(*r)) : std::nullopt;
}

DescriptionJudgement judge_description(const JudgeItem& item, backends::BackendClient& chat,
                                       const annotate::PromptLibrary& prompts, int attempts) {
  if (item.generated.empty() || item.reference.empty())
    throw PreconditionError(fmt::format("{}: judge needs non-empty generated and reference texts", item.item_id));
  DescriptionJudgement out{item.item_id, {}};
  annotate::RetryPolicy policy;
  policy.attempts = attempts;
  policy.arity_attempts = attempts;
  policy.suffix = "Respond with a single integer from 1 to 5.";
  for (auto metric : kJudgeMetrics) {
    try {
      out.raw[static_cast<std::size_t>(metric)] = annotate::chat_structured<int>(
          chat, prompts.judge(metric, item.reference, item.generated),
          [](const std::string& reply) {
            auto v = parse_judge_score(reply);
            if (!v) throw ParseError("judge reply is not an integer in 1-5", reply);
            return *v;
          },
          policy);
    } catch (const ParseError& e) {
      spdlog::warn("{}: {} excluded, judge replied '{}'", item.item_id, annotate::metric_key(metric),
                   e.raw().substr(0, 80));
    }
  }
  return out;
}

JudgeCorpus aggregate_judgements(std::vector<DescriptionJudgement> judgements) {
  JudgeCorpus c;
  c.items = static_cast<int>(judgements.size());
  for (auto metric : kJudgeMetrics) {
    const std::string key(annotate::metric_key(metric));
    double sum = 0;
    int n = 0;
    for (const auto& j : judgements)
      if (auto s = j.scaled(metric)) {
        sum += *s;
        ++n;
      }
    const int excluded = c.items - n;
    c.excluded[key] = excluded;
    if (c.items > 0 && excluded > kMaxExcludedFrac * c.items)
      throw ValidationError(fmt::format("judge metric {}: {} of {} items excluded (limit {:.0f}%)", key, excluded,
                                        c.items, kMaxExcludedFrac * 100));
    c.mean[key] = n ? sum / n : 0.0;
  }
  c.judgements = std::move(judgements);
  return c;
}

JudgeCorpus judge_corpus(const std::vector<JudgeItem>& items, backends::BackendClient& chat, int workers,
                         const annotate::PromptLibrary& prompts) {
  std::vector<DescriptionJudgement> out(items.size());
  parallel_for(items.size(), workers, [&](std::size_t i) { out[i] = judge_description(items[i], chat, prompts); });
  return aggregate_judgements(std::move(out));
}

json to_json(const JudgeCorpus& c) {
  json per_item = json::array();
  for (const auto& j : c.judgements) {
    json scores = json::object();
    for (auto metric : kJudgeMetrics) {
      const auto& r = j.raw[static_cast<std::size_t>(metric)];
      scores[std::string(annotate::metric_key(metric))] = r ? json(*r) : json(nullptr);
    }
    per_item.push_back({{"item_id", j.item_id}, {"raw", std::move(scores)}});
  }
  return {{"mean", c.mean}, {"excluded", c.excluded}, {"items", c.items}, {"judgements", std::move(per_item)}};
}

}  // namespace adlforge::eval
