#include "adlforge/eval/mementos.hpp"

#include <cctype>

#include <fmt/format.h>

#include "adlforge/model/assets.hpp"
#include "adlforge/model/error.hpp"
#include "adlforge/model/manifest.hpp"

namespace adlforge::eval {

using nlohmann::json;

KeywordVocab KeywordVocab::from_json(const json& j) {
  try {
    KeywordVocab v;
    v.version = j.value("version", "");
    for (const auto& w : j.at("verbs")) v.verbs.insert(w.get<std::string>());
    for (const auto& w : j.at("nouns")) v.nouns.insert(w.get<std::string>());
    if (j.contains("synonyms"))
      for (const auto& [k, t] : j["synonyms"].items()) v.synonyms[k] = t.get<std::string>();
    if (v.verbs.empty() || v.nouns.empty()) throw PreconditionError("keyword vocabulary needs verbs and nouns");
    for (const auto& [k, t] : v.synonyms)
      if (!v.verbs.count(t) && !v.nouns.count(t))
        throw ManifestError(fmt::format("synonym '{}' folds onto '{}', which is not a keyword", k, t));
    return v;
  } catch (const json::exception& e) {
    throw ManifestError(fmt::format("bad keyword vocabulary: {}", e.what()));
  }
}

KeywordVocab KeywordVocab::builtin() {
  static const KeywordVocab v = from_json(json::parse(builtin_asset("vocab/mementos_keywords.json")));
  return v;
}

KeywordVocab KeywordVocab::load(const std::filesystem::path& path) {
  try {
    return from_json(json::parse(read_file(path)));
  } catch (const json::parse_error& e) {
    throw ManifestError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

namespace {

const std::map<std::string, std::string>& irregular() {
  static const std::map<std::string, std::string> m = {
      {"ate", "eat"},     {"eaten", "eat"},      {"drank", "drink"}, {"drunk", "drink"},   {"sat", "sit"},
      {"stood", "stand"}, {"took", "take"},      {"taken", "take"},  {"put", "put"},       {"threw", "throw"},
      {"thrown", "throw"}, {"wrote", "write"},   {"written", "write"}, {"read", "read"},   {"fell", "fall"},
      {"fallen", "fall"}, {"went", "go"},        {"gone", "go"},     {"held", "hold"},     {"brought", "bring"},
      {"made", "make"},   {"got", "get"},        {"gotten", "get"},  {"wore", "wear"},     {"worn", "wear"},
      {"lay", "lie"},     {"lying", "lie"},      {"ran", "run"},     {"came", "come"},     {"shook", "shake"},
      {"cut", "cut"},     {"left", "leave"},     {"rose", "rise"},   {"risen", "rise"},    {"woke", "wake"},
      {"hung", "hang"},   {"swept", "sweep"},    {"knelt", "kneel"}, {"bent", "bend"},     {"caught", "catch"},
      {"teeth", "tooth"}, {"feet", "foot"},      {"men", "man"},     {"women", "woman"},   {"children", "child"},
      {"knives", "knife"}, {"shelves", "shelf"}, {"leaves", "leaf"}};
  return m;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool ends_with(std::string_view s, std::string_view suf) {
  return s.size() > suf.size() && s.substr(s.size() - suf.size()) == suf;
}

// Suffix-stripped variants of `stem` (after removing an -ing / -ed ending).
void add_stem_variants(std::string stem, std::vector<std::string>& out) {
  out.push_back(stem);
  out.push_back(stem + "e");
  const auto n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1])) out.push_back(stem.substr(0, n - 1));
}

}  // namespace

std::vector<std::string> lemma_candidates(std::string_view word) {
  std::string w(word);
  std::vector<std::string> out{w};
  if (auto it = irregular().find(w); it != irregular().end()) out.push_back(it->second);
  if (ends_with(w, "ies")) out.push_back(w.substr(0, w.size() - 3) + "y");
  if (ends_with(w, "ied")) out.push_back(w.substr(0, w.size() - 3) + "y");
  if (ends_with(w, "ing") && w.size() > 4) add_stem_variants(w.substr(0, w.size() - 3), out);
  if (ends_with(w, "ed") && w.size() > 3) add_stem_variants(w.substr(0, w.size() - 2), out);
  if (ends_with(w, "es")) out.push_back(w.substr(0, w.size() - 2));
  if (ends_with(w, "s") && !ends_with(w, "ss")) out.push_back(w.substr(0, w.size() - 1));
  return out;
}

KeywordSets extract_keywords(std::string_view text, const KeywordVocab& vocab) {
  KeywordSets out;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    for (auto cand : lemma_candidates(word)) {
      if (auto s = vocab.synonyms.find(cand); s != vocab.synonyms.end()) cand = s->second;
      const bool v = vocab.verbs.count(cand) > 0;
      const bool n = vocab.nouns.count(cand) > 0;
      if (v) out.verbs.insert(cand);
      if (n) out.nouns.insert(cand);
      if (v || n) break;
    }
    word.clear();
  };
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalpha(u))
      word += static_cast<char>(std::tolower(u));
    else
      flush();
  }
  flush();
  return out;
}

Prf prf(const std::set<std::string>& generated, const std::set<std::string>& reference) {
  std::size_t inter = 0;
  for (const auto& g : generated) inter += reference.count(g);
  Prf r;
  if (!generated.empty()) r.precision = static_cast<double>(inter) / generated.size();
  if (!reference.empty()) r.recall = static_cast<double>(inter) / reference.size();
  if (r.precision + r.recall > 0) r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

MementosScore mementos_f1(std::string_view generated, std::string_view reference, const KeywordVocab& vocab) {
  const auto g = extract_keywords(generated, vocab);
  const auto r = extract_keywords(reference, vocab);
  MementosScore s;
  s.verb = prf(g.verbs, r.verbs);
  s.noun = prf(g.nouns, r.nouns);
  // Tag keys so a word that is both verb and noun counts once per role.
  std::set<std::string> ga, ra;
  for (const auto& w : g.verbs) ga.insert("v:" + w);
  for (const auto& w : g.nouns) ga.insert("n:" + w);
  for (const auto& w : r.verbs) ra.insert("v:" + w);
  for (const auto& w : r.nouns) ra.insert("n:" + w);
  s.overall = prf(ga, ra);
  return s;
}

MementosCorpus mementos_corpus(const std::vector<MementosScore>& scores) {
  MementosCorpus c;
  c.count = scores.size();
  if (scores.empty()) return c;
  for (const auto& s : scores) {
    c.verb_f1 += s.verb.f1;
    c.noun_f1 += s.noun.f1;
    c.precision += s.overall.precision;
    c.recall += s.overall.recall;
  }
  const double n = static_cast<double>(scores.size());
  c.verb_f1 /= n;
  c.noun_f1 /= n;
  c.precision /= n;
  c.recall /= n;
  return c;
}

json to_json(const MementosScore& s) {
  auto p = [](const Prf& x) { return json{{"precision", x.precision}, {"recall", x.recall}, {"f1", x.f1}}; };
  return {{"verb_f1", s.verb.f1},
          {"noun_f1", s.noun.f1},
          {"precision", s.overall.precision},
          {"recall", s.overall.recall},
          {"verb", p(s.verb)},
          {"noun", p(s.noun)}};
}

json to_json(const MementosCorpus& c) {
  return {{"verb_f1", c.verb_f1}, {"noun_f1", c.noun_f1}, {"precision", c.precision}, {"recall", c.recall},
          {"count", c.count}};
}

}  // namespace adlforge::eval
