#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace adlforge {

/// Versioned id -> label table of action classes.
class ActionVocabulary {
 public:
  ActionVocabulary() = default;
  ActionVocabulary(std::string version, std::map<int, std::string> labels);

  /// The shipped 120-class table.
  static ActionVocabulary builtin();
  static ActionVocabulary from_json_text(const std::string& text);
  static ActionVocabulary load(const std::filesystem::path& path);

  const std::string& version() const { return version_; }
  std::size_t size() const { return labels_.size(); }
  bool contains(int id) const { return labels_.count(id) != 0; }
  const std::string& label(int id) const;
  std::vector<int> ids() const;
  std::vector<std::string> labels() const;
  std::optional<int> id_for_label(const std::string& label) const;

 private:
  std::string version_;
  std::map<int, std::string> labels_;
};

}  // namespace adlforge
