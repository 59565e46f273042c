#include "adlforge/model/manifest.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <unistd.h>

#include "adlforge/model/error.hpp"
#include "adlforge/model/json_io.hpp"

namespace adlforge {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  static std::atomic<unsigned long> counter{0};
  tmp += fmt::format(".tmp{}.{}", ::getpid(), counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ManifestError(fmt::format("cannot write {}", tmp.string()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ManifestError(fmt::format("short write to {}", tmp.string()));
  }
  fs::rename(tmp, path);
}

void for_each_jsonl(const fs::path& path, const std::function<void(int, const json&)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError(fmt::format("cannot open manifest {}", path.string()));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ManifestError(fmt::format("{}: line {}: malformed JSON ({})", path.string(), line_no,
                                      e.what()));
    }
    try {
      fn(line_no, row);
    } catch (const ManifestError& e) {
      throw ManifestError(fmt::format("{}: line {}: {}", path.string(), line_no, e.what()));
    } catch (const ValidationError& e) {
      throw ManifestError(fmt::format("{}: line {}: {}", path.string(), line_no, e.what()));
    }
  }
}

void write_jsonl(const fs::path& path, const std::vector<json>& rows) {
  std::string text;
  for (const auto& r : rows) {
    text += r.dump();
    text += '\n';
  }
  write_file_atomic(path, text);
}

std::vector<ClipRecord> load_corpus_manifest(const fs::path& path, const ActionVocabulary& vocab) {
  std::vector<ClipRecord> out;
  std::unordered_map<std::string, int> first_line;
  std::map<int, std::pair<std::string, int>> label_of;
  for_each_jsonl(path, [&](int line_no, const json& row) {
    auto c = row.get<ClipRecord>();
    if (c.clip_id.empty()) throw ManifestError("empty clip_id");
    if (c.num_frames < 1) throw ManifestError(fmt::format("clip {}: num_frames must be >= 1", c.clip_id));
    if (!(c.fps > 0) || !std::isfinite(c.fps))
      throw ManifestError(fmt::format("clip {}: fps must be > 0", c.clip_id));
    if (!vocab.contains(c.action_id))
      throw ManifestError(fmt::format("clip {}: unknown action_id {}", c.clip_id, c.action_id));
    if (auto [it, inserted] = first_line.emplace(c.clip_id, line_no); !inserted)
      throw ManifestError(fmt::format("duplicate clip_id '{}' on lines {} and {}", c.clip_id,
                                      it->second, line_no));
    if (auto [it, inserted] = label_of.emplace(c.action_id, std::pair{c.action_label, line_no});
        !inserted && it->second.first != c.action_label)
      throw ManifestError(fmt::format("action_id {} labelled '{}' (line {}) and '{}'", c.action_id,
                                      it->second.first, it->second.second, c.action_label));
    out.push_back(std::move(c));
  });
  return out;
}

void write_corpus_manifest(const fs::path& path, const std::vector<ClipRecord>& clips) {
  std::vector<json> rows(clips.begin(), clips.end());
  write_jsonl(path, rows);
}

std::vector<StitchedVideo> load_stitched_manifest(const fs::path& path) {
  std::vector<StitchedVideo> out;
  for_each_jsonl(path, [&](int, const json& row) { out.push_back(row.get<StitchedVideo>()); });
  return out;
}

void write_stitched_manifest(const fs::path& path, const std::vector<StitchedVideo>& videos) {
  std::vector<json> rows(videos.begin(), videos.end());
  write_jsonl(path, rows);
}

std::vector<QaPair> load_qa_manifest(const fs::path& path) {
  std::vector<QaPair> out;
  for_each_jsonl(path, [&](int, const json& row) { out.push_back(row.get<QaPair>()); });
  return out;
}

void write_qa_manifest(const fs::path& path, const std::vector<QaPair>& pairs) {
  std::vector<json> rows(pairs.begin(), pairs.end());
  write_jsonl(path, rows);
}

fs::path resolve_relative(const fs::path& manifest, const std::string& stored) {
  fs::path p(stored);
  if (p.is_absolute()) return p;
  return manifest.parent_path() / p;
}

}  // namespace adlforge
