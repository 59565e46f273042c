#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <string>

namespace adlforge::backends {

/// Content-addressed response store on the local filesystem. Each entry is
/// `<dir>/<key[0..2]>/<key>`: a one-line JSON header (key, created_at,
/// sha256, size) followed by the raw response bytes. Writes go to a temp
/// file that is renamed into place, so concurrent writers are safe.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  /// Entry for `key`; corrupted entries are reported as misses.
  std::optional<std::string> get(const std::string& key);
  void put(const std::string& key, const std::string& value);

  const std::filesystem::path& dir() const { return dir_; }
  std::size_t corrupted_entries() const { return corrupted_.load(); }

 private:
  std::filesystem::path entry_path(const std::string& key) const;

  std::filesystem::path dir_;
  std::atomic<std::size_t> corrupted_{0};
};

}  // namespace adlforge::backends
