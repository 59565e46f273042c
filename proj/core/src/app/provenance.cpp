#include "adlforge/app/provenance.hpp"

#include <fmt/format.h>

#include "adlforge/annotate/prompts.hpp"
#include "adlforge/model/action_vocab.hpp"
#include "adlforge/model/error.hpp"
#include "adlforge/model/hashing.hpp"
#include "adlforge/model/manifest.hpp"

namespace adlforge::app {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view tool_version() { return "0.3.0"; }

std::map<std::string, std::string> hash_files(const std::vector<fs::path>& files, const fs::path& base) {
  std::map<std::string, std::string> out;
  auto key = [&](const fs::path& p) {
    std::error_code ec;
    auto rel = fs::relative(p, base, ec);
    return (ec || rel.empty() ? p : rel).generic_string();
  };
  for (const auto& f : files) {
    if (fs::is_directory(f)) {
      std::vector<fs::path> inner;
      // Upstream provenance records embed their own run paths; the data files
      // they describe are hashed directly.
      for (const auto& e : fs::recursive_directory_iterator(f))
        if (e.is_regular_file() && e.path().filename() != kProvenanceFile) inner.push_back(e.path());
      for (const auto& p : inner) out[key(p)] = sha256_file(p);
    } else if (fs::is_regular_file(f)) {
      out[key(f)] = sha256_file(f);
    } else {
      throw PreconditionError(fmt::format("input {} does not exist", f.string()));
    }
  }
  return out;
}

Provenance make_provenance(const std::string& stage, const RunConfig& config) {
  Provenance p;
  p.stage = stage;
  p.config = config.snapshot();
  p.seed = config.seed;
  p.prompts_version = std::string(annotate::PromptLibrary::kVersion);
  p.vocab_version = ActionVocabulary::builtin().version();
  return p;
}

json to_json(const Provenance& p) {
  return {{"tool", "adlforge"},
          {"version", tool_version()},
          {"stage", p.stage},
          {"seed", p.seed},
          {"prompts_version", p.prompts_version},
          {"vocab_version", p.vocab_version},
          {"config", p.config},
          {"inputs", p.inputs},
          {"outputs", p.outputs}};
}

void write_provenance(const fs::path& dir, Provenance p) {
  std::vector<fs::path> outputs;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != kProvenanceFile) outputs.push_back(e.path());
  // Nested stage directories carry their own record.
  std::erase_if(outputs, [&](const fs::path& f) {
    for (auto d = f.parent_path(); d != dir && d.has_relative_path(); d = d.parent_path())
      if (fs::exists(d / kProvenanceFile)) return true;
    return false;
  });
  p.outputs = hash_files(outputs, dir);
  write_file_atomic(dir / kProvenanceFile, to_json(p).dump(2) + "\n");
}

Provenance read_provenance(const fs::path& dir) {
  const auto path = dir / kProvenanceFile;
  try {
    const json j = json::parse(read_file(path));
    Provenance p;
    p.stage = j.at("stage").get<std::string>();
    p.config = j.at("config");
    p.seed = j.at("seed").get<std::uint64_t>();
    p.prompts_version = j.at("prompts_version").get<std::string>();
    p.vocab_version = j.at("vocab_version").get<std::string>();
    p.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    p.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    return p;
  } catch (const json::exception& e) {
    throw ManifestError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

fs::path versioned_output(const fs::path& base, bool overwrite) {
  if (overwrite) {
    fs::remove_all(base);
    return base;
  }
  if (!fs::exists(base)) return base;
  for (int v = 2;; ++v) {
    fs::path cand = base.string() + fmt::format("-v{}", v);
    if (!fs::exists(cand)) return cand;
  }
}

}  // namespace adlforge::app
