#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace adlforge::eval {

/// Verb and noun keyword lists plus a synonym map folded onto them.
struct KeywordVocab {
  std::string version;
  std::set<std::string> verbs;
  std::set<std::string> nouns;
  std::map<std::string, std::string> synonyms;

  static KeywordVocab builtin();
  static KeywordVocab from_json(const nlohmann::json& j);
  static KeywordVocab load(const std::filesystem::path& path);
};

/// Candidate base forms of a lower-case word, most specific first.
std::vector<std::string> lemma_candidates(std::string_view word);

struct KeywordSets {
  std::set<std::string> verbs;
  std::set<std::string> nouns;
};

KeywordSets extract_keywords(std::string_view text, const KeywordVocab& vocab);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// P = |G∩R|/|G|, R = |G∩R|/|R|; empty sides give zeros.
Prf prf(const std::set<std::string>& generated, const std::set<std::string>& reference);

struct MementosScore {
  Prf verb;
  Prf noun;
  double verb_f1() const { return verb.f1; }
  double noun_f1() const { return noun.f1; }
  /// Over the union of verb and noun keywords.
  Prf overall;
};

MementosScore mementos_f1(std::string_view generated, std::string_view reference, const KeywordVocab& vocab);

struct MementosCorpus {
  double verb_f1 = 0.0;
  double noun_f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t count = 0;
};

/// Macro average over per-video scores.
MementosCorpus mementos_corpus(const std::vector<MementosScore>& scores);

nlohmann::json to_json(const MementosScore& s);
nlohmann::json to_json(const MementosCorpus& c);

}  // namespace adlforge::eval
