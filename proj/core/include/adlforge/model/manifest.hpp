#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adlforge/model/action_vocab.hpp"
#include "adlforge/model/types.hpp"

namespace adlforge {

/// Calls `fn(line_number, object)` for every non-blank line of a JSON Lines
/// file. Line numbers are 1-based. Malformed lines raise ManifestError
/// naming the line.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(int, const nlohmann::json&)>& fn);

/// Writes one compact JSON object per line, atomically (temp file + rename).
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);

/// Writes `text` to `path` atomically.
void write_file_atomic(const std::filesystem::path& path, std::string_view text);
std::string read_file(const std::filesystem::path& path);

/// Loads `corpus.jsonl`. Enforces ClipRecord invariants, clip_id uniqueness,
/// action ids known to `vocab`, and a single label per action id.
std::vector<ClipRecord> load_corpus_manifest(const std::filesystem::path& path,
                                             const ActionVocabulary& vocab);
void write_corpus_manifest(const std::filesystem::path& path, const std::vector<ClipRecord>& clips);

std::vector<StitchedVideo> load_stitched_manifest(const std::filesystem::path& path);
void write_stitched_manifest(const std::filesystem::path& path,
                             const std::vector<StitchedVideo>& videos);

std::vector<QaPair> load_qa_manifest(const std::filesystem::path& path);
void write_qa_manifest(const std::filesystem::path& path, const std::vector<QaPair>& pairs);

/// Resolves a manifest-relative path against the manifest's directory.
std::filesystem::path resolve_relative(const std::filesystem::path& manifest,
                                       const std::string& stored);

}  // namespace adlforge
