#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adlforge/annotate/llm_parse.hpp"
#include "adlforge/model/manifest.hpp"

namespace testing {

struct CorpusOutcome {
  std::string id;
  bool ok = false;
  std::string detail;
};

/// Runs parse_llm_mapping over every corpus case and compares the Q/A items
/// with the case's strict-JSON oracle.
inline std::vector<CorpusOutcome> run_parse_corpus(const std::filesystem::path& path) {
  using nlohmann::json;
  const json doc = json::parse(adlforge::read_file(path));
  std::vector<CorpusOutcome> out;
  for (const auto& c : doc.at("cases")) {
    CorpusOutcome r{c.at("id").get<std::string>()};
    const int expect = c.at("expect").get<int>();
    json oracle = json::parse(c.at("oracle").get<std::string>());
    if (oracle.is_object()) oracle = json::array({oracle});
    try {
      const auto parsed = adlforge::annotate::parse_llm_mapping(c.at("input").get<std::string>(), expect);
      r.ok = parsed.items.size() == oracle.size();
      for (std::size_t i = 0; r.ok && i < oracle.size(); ++i)
        r.ok = parsed.items[i].question == oracle[i].at("Q").get<std::string>() &&
               parsed.items[i].answer == oracle[i].at("A").get<std::string>();
      // The strict rendering must parse back to the same items.
      const auto again = adlforge::annotate::parse_llm_mapping(adlforge::annotate::to_strict_json(parsed.items, expect), expect);
      r.ok = r.ok && again.items == parsed.items && again.strategy == "strict";
      if (!r.ok) r.detail = "got " + adlforge::annotate::to_strict_json(parsed.items, expect);
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace testing
