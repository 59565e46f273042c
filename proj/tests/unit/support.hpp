#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "adlforge/backends/cache.hpp"
#include "adlforge/backends/client.hpp"
#include "adlforge/backends/mock.hpp"
#include "adlforge/backends/transport.hpp"

namespace testing {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("adlforge-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

/// Mock-backed client with its own cache and call counter.
struct MockClient {
  std::shared_ptr<adlforge::backends::CountingTransport> counter;
  std::shared_ptr<adlforge::backends::ResponseCache> cache;
  std::unique_ptr<adlforge::backends::BackendClient> client;
  adlforge::backends::RateLimiter limiter;

  MockClient(adlforge::backends::FixtureTable table, const fs::path& cache_dir) {
    counter = std::make_shared<adlforge::backends::CountingTransport>(adlforge::backends::mock_backend(std::move(table)));
    cache = std::make_shared<adlforge::backends::ResponseCache>(cache_dir);
    adlforge::backends::ClientOptions opt;
    opt.backoff_base = std::chrono::milliseconds(1);
    client = std::make_unique<adlforge::backends::BackendClient>(counter, cache, opt, &limiter);
  }
  adlforge::backends::BackendClient& operator*() { return *client; }
  std::size_t calls() const { return counter->calls(); }
};

/// Fixture that answers every request of `role` containing `needle` with `reply`.
inline adlforge::backends::Fixture reply_fixture(adlforge::backends::Role role, std::string needle, std::string reply) {
  adlforge::backends::Fixture f;
  f.role = role;
  if (!needle.empty()) f.contains.push_back(std::move(needle));
  f.reply = std::move(reply);
  return f;
}

}  // namespace testing
