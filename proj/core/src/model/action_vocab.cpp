#include "adlforge/model/action_vocab.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "adlforge/model/assets.hpp"
#include "adlforge/model/error.hpp"
#include "adlforge/model/manifest.hpp"

namespace adlforge {

ActionVocabulary::ActionVocabulary(std::string version, std::map<int, std::string> labels)
    : version_(std::move(version)), labels_(std::move(labels)) {}

ActionVocabulary ActionVocabulary::builtin() {
  return from_json_text(std::string(builtin_asset("vocab/ntu120_actions.json")));
}

ActionVocabulary ActionVocabulary::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(fmt::format("action table: {}", e.what()));
  }
  std::map<int, std::string> labels;
  for (const auto& entry : j.at("actions")) {
    int id = entry.at("id").get<int>();
    auto label = entry.at("label").get<std::string>();
    if (label.empty()) throw ManifestError(fmt::format("action table: empty label for id {}", id));
    if (!labels.emplace(id, std::move(label)).second)
      throw ManifestError(fmt::format("action table: duplicate id {}", id));
  }
  if (labels.empty()) throw ManifestError("action table is empty");
  return ActionVocabulary(j.value("version", std::string{"unversioned"}), std::move(labels));
}

ActionVocabulary ActionVocabulary::load(const std::filesystem::path& path) {
  return from_json_text(read_file(path));
}

const std::string& ActionVocabulary::label(int id) const {
  auto it = labels_.find(id);
  if (it == labels_.end()) throw ManifestError(fmt::format("unknown action_id {}", id));
  return it->second;
}

std::vector<int> ActionVocabulary::ids() const {
  std::vector<int> out;
  out.reserve(labels_.size());
  for (const auto& [id, _] : labels_) out.push_back(id);
  return out;
}

std::vector<std::string> ActionVocabulary::labels() const {
  std::vector<std::string> out;
  out.reserve(labels_.size());
  for (const auto& [_, l] : labels_) out.push_back(l);
  return out;
}

std::optional<int> ActionVocabulary::id_for_label(const std::string& label) const {
  for (const auto& [id, l] : labels_)
    if (l == label) return id;
  return std::nullopt;
}

}  // namespace adlforge
