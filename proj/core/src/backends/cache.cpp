#include "adlforge/backends/cache.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "adlforge/model/error.hpp"
#include "adlforge/model/hashing.hpp"
#include "adlforge/model/manifest.hpp"

namespace adlforge::backends {

namespace fs = std::filesystem;
using nlohmann::json;

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw PreconditionError(fmt::format("cannot create cache dir {}: {}", dir_.string(), ec.message()));
}

fs::path ResponseCache::entry_path(const std::string& key) const {
  if (key.size() < 3) throw PreconditionError("cache key too short");
  return dir_ / key.substr(0, 2) / key;
}

std::optional<std::string> ResponseCache::get(const std::string& key) {
  const auto path = entry_path(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string header;
  std::getline(in, header);
  std::ostringstream rest;
  rest << in.rdbuf();
  std::string value = rest.str();

  auto corrupt = [&](std::string_view why) -> std::optional<std::string> {
    ++corrupted_;
    spdlog::warn("cache entry {} is corrupted ({}); treating as miss", path.string(), why);
    return std::nullopt;
  };
  json h;
  try {
    h = json::parse(header);
  } catch (const json::parse_error&) {
    return corrupt("bad header");
  }
  if (!h.is_object() || h.value("key", "") != key) return corrupt("key mismatch");
  if (h.value("size", std::size_t{0}) != value.size()) return corrupt("size mismatch");
  if (h.value("sha256", "") != sha256_hex(value)) return corrupt("checksum mismatch");
  return value;
}

void ResponseCache::put(const std::string& key, const std::string& value) {
  const auto path = entry_path(key);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  const auto now = std::chrono::system_clock::now();
  json h = {{"key", key},
            {"created_at", std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count()},
            {"sha256", sha256_hex(value)},
            {"size", value.size()}};
  write_file_atomic(path, h.dump() + "\n" + value);
}

}  // namespace adlforge::backends
