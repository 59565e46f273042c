#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adlforge/model/action_vocab.hpp"

namespace adlforge::backends {
class BackendClient;
}

namespace adlforge::curation {

struct CompositeSequence {
  std::string sequence_id;
  std::vector<int> action_ids;

  friend bool operator==(const CompositeSequence&, const CompositeSequence&) = default;
};

struct SequenceOptions {
  int count = 160;
  int min_len = 3;
  int max_len = 7;
  std::uint64_t seed = 7;
};

enum class SequenceGenerator { sampler, llm };

/// Number of distinct valid sequences over `n` actions with lengths in
/// [min_len, max_len]; saturates at UINT64_MAX.
std::uint64_t count_possible_sequences(std::uint64_t n, int min_len, int max_len);

/// Seeded sampler: length uniform on [min_len, max_len], each action uniform
/// over the table excluding the previous one; duplicates are redrawn.
std::vector<CompositeSequence> sample_composite_sequences(const std::vector<int>& action_ids,
                                                          const SequenceOptions& opt);

/// Asks the chat backend for candidate sequences, then validates and
/// deduplicates them with the sampler's rules.
std::vector<CompositeSequence> llm_composite_sequences(const ActionVocabulary& vocab,
                                                       const SequenceOptions& opt,
                                                       backends::BackendClient& chat);

std::vector<CompositeSequence> generate_composite_sequences(const ActionVocabulary& vocab,
                                                            const SequenceOptions& opt,
                                                            SequenceGenerator generator,
                                                            backends::BackendClient* chat = nullptr);

/// Throws ValidationError on repeats, short sequences or unknown ids.
void validate_sequence(const CompositeSequence& seq, const ActionVocabulary& vocab);

std::string sequence_id(int index);

nlohmann::json to_json(const CompositeSequence& s);
CompositeSequence sequence_from_json(const nlohmann::json& j);
void write_sequences(const std::filesystem::path& path, const std::vector<CompositeSequence>& seqs);
std::vector<CompositeSequence> load_sequences(const std::filesystem::path& path);

}  // namespace adlforge::curation
