#include "adlforge/curation/sequences.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "adlforge/annotate/llm_call.hpp"
#include "adlforge/annotate/llm_parse.hpp"
#include "adlforge/annotate/prompts.hpp"
#include "adlforge/model/error.hpp"
#include "adlforge/model/manifest.hpp"
#include "adlforge/model/rng.hpp"

namespace adlforge::curation {

using nlohmann::json;

std::string sequence_id(int index) { return fmt::format("SEQ{:04d}", index); }

std::uint64_t count_possible_sequences(std::uint64_t n, int min_len, int max_len) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (n == 0 || min_len < 1 || max_len < min_len) return 0;
  std::uint64_t total = 0;
  for (int len = min_len; len <= max_len; ++len) {
    std::uint64_t c = n;
    for (int k = 1; k < len; ++k) {
      if (n - 1 == 0) {
        c = 0;
        break;
      }
      if (c > kMax / (n - 1)) return kMax;
      c *= n - 1;
    }
    if (total > kMax - c) return kMax;
    total += c;
  }
  return total;
}

namespace {

void check_options(const SequenceOptions& opt) {
  if (opt.count < 1) throw PreconditionError("sequence count must be >= 1");
  if (opt.min_len < 2) throw PreconditionError("sequences need at least 2 actions");
  if (opt.max_len < opt.min_len) throw PreconditionError("max_len must be >= min_len");
}

}  // namespace

std::vector<CompositeSequence> sample_composite_sequences(const std::vector<int>& action_ids,
                                                          const SequenceOptions& opt) {
  check_options(opt);
  if (action_ids.empty()) throw PreconditionError("action table is empty");
  const auto possible = count_possible_sequences(action_ids.size(), opt.min_len, opt.max_len);
  if (static_cast<std::uint64_t>(opt.count) > possible)
    throw ValidationError(fmt::format("cannot draw {} distinct sequences: only {} exist over {} action(s) "
                                      "with lengths {}..{} and no immediate repeats",
                                      opt.count, possible, action_ids.size(), opt.min_len, opt.max_len));
  Rng rng(opt.seed);
  std::set<std::vector<int>> seen;
  std::vector<CompositeSequence> out;
  const std::uint64_t max_draws = 1000ULL * static_cast<std::uint64_t>(opt.count) + 100000ULL;
  for (std::uint64_t draws = 0; static_cast<int>(out.size()) < opt.count; ++draws) {
    if (draws >= max_draws)
      throw ValidationError(fmt::format("deduplication exhausted after {} draws with {} of {} sequences",
                                        draws, out.size(), opt.count));
    const int len = rng.uniform_int(opt.min_len, opt.max_len);
    std::vector<int> seq;
    seq.reserve(len);
    seq.push_back(action_ids[rng.uniform_index(action_ids.size())]);
    for (int k = 1; k < len; ++k) {
      // Uniform over the table minus the previous action.
      const auto prev_pos = std::find(action_ids.begin(), action_ids.end(), seq.back()) - action_ids.begin();
      auto j = rng.uniform_index(action_ids.size() - 1);
      if (static_cast<std::ptrdiff_t>(j) >= prev_pos) ++j;
      seq.push_back(action_ids[j]);
    }
    if (!seen.insert(seq).second) continue;
    out.push_back({sequence_id(static_cast<int>(out.size())), std::move(seq)});
  }
  return out;
}

void validate_sequence(const CompositeSequence& seq, const ActionVocabulary& vocab) {
  if (seq.action_ids.size() < 2)
    throw ValidationError(fmt::format("sequence {} has fewer than 2 actions", seq.sequence_id));
  for (std::size_t i = 0; i < seq.action_ids.size(); ++i) {
    if (!vocab.contains(seq.action_ids[i]))
      throw ValidationError(fmt::format("sequence {} uses unknown action {}", seq.sequence_id, seq.action_ids[i]));
    if (i > 0 && seq.action_ids[i] == seq.action_ids[i - 1])
      throw ValidationError(fmt::format("sequence {} repeats action {} at positions {} and {}", seq.sequence_id,
                                        seq.action_ids[i], i - 1, i));
  }
}

std::vector<CompositeSequence> llm_composite_sequences(const ActionVocabulary& vocab, const SequenceOptions& opt,
                                                       backends::BackendClient& chat) {
  check_options(opt);
  if (vocab.size() == 0) throw PreconditionError("action table is empty");
  std::string action_list;
  for (int id : vocab.ids()) {
    if (!action_list.empty()) action_list += ", ";
    action_list += fmt::format("{}. {}", id, vocab.label(id));
  }
  const auto& prompts = annotate::PromptLibrary::builtin();
  std::vector<backends::ChatMessage> messages = {
      {"user", prompts.composite_sequences(action_list, opt.count, opt.min_len, opt.max_len)}};

  std::set<std::vector<int>> seen;
  std::vector<CompositeSequence> out;
  auto accept = [&](const std::string& reply) {
    auto value = annotate::parse_json_lenient(reply);
    if (!value || !value->is_array()) throw ParseError("reply is not a list of sequences", reply);
    std::size_t rejected = 0;
    for (const auto& item : *value) {
      if (static_cast<int>(out.size()) == opt.count) break;
      std::vector<int> ids;
      bool ok = item.is_array();
      if (ok)
        for (const auto& v : item) {
          if (v.is_number_integer()) ids.push_back(v.get<int>());
          else if (v.is_string() && !v.get<std::string>().empty() &&
                   v.get<std::string>().find_first_not_of("0123456789") == std::string::npos)
            ids.push_back(std::stoi(v.get<std::string>()));
          else ok = false;
        }
      CompositeSequence cand{sequence_id(static_cast<int>(out.size())), ids};
      if (ok && static_cast<int>(ids.size()) >= opt.min_len && static_cast<int>(ids.size()) <= opt.max_len) {
        try {
          validate_sequence(cand, vocab);
        } catch (const ValidationError&) {
          ok = false;
        }
      } else {
        ok = false;
      }
      if (!ok || !seen.insert(ids).second) {
        ++rejected;
        continue;
      }
      out.push_back(std::move(cand));
    }
    if (rejected) spdlog::warn("dropped {} invalid or duplicate sequence(s) from the model reply", rejected);
    if (static_cast<int>(out.size()) < opt.count)
      throw ParseError(fmt::format("only {} of {} valid distinct sequences so far", out.size(), opt.count), reply);
    return true;
  };
  annotate::chat_structured<bool>(chat, std::move(messages), accept);
  return out;
}

std::vector<CompositeSequence> generate_composite_sequences(const ActionVocabulary& vocab, const SequenceOptions& opt,
                                                            SequenceGenerator generator,
                                                            backends::BackendClient* chat) {
  if (generator == SequenceGenerator::llm) {
    if (!chat) throw PreconditionError("llm sequence generation needs a chat backend");
    return llm_composite_sequences(vocab, opt, *chat);
  }
  return sample_composite_sequences(vocab.ids(), opt);
}

json to_json(const CompositeSequence& s) { return {{"sequence_id", s.sequence_id}, {"action_ids", s.action_ids}}; }

CompositeSequence sequence_from_json(const json& j) {
  try {
    return {j.at("sequence_id").get<std::string>(), j.at("action_ids").get<std::vector<int>>()};
  } catch (const json::exception& e) {
    throw ManifestError(fmt::format("bad sequence record: {}", e.what()));
  }
}

void write_sequences(const std::filesystem::path& path, const std::vector<CompositeSequence>& seqs) {
  std::vector<json> rows;
  rows.reserve(seqs.size());
  for (const auto& s : seqs) rows.push_back(to_json(s));
  write_jsonl(path, rows);
}

std::vector<CompositeSequence> load_sequences(const std::filesystem::path& path) {
  std::vector<CompositeSequence> out;
  std::set<std::string> ids;
  for_each_jsonl(path, [&](int line, const json& j) {
    auto s = sequence_from_json(j);
    if (!ids.insert(s.sequence_id).second)
      throw ManifestError(fmt::format("line {}: duplicate sequence_id '{}'", line, s.sequence_id));
    out.push_back(std::move(s));
  });
  return out;
}

}  // namespace adlforge::curation
