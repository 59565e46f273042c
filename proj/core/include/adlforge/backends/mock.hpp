#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adlforge/backends/transport.hpp"

namespace adlforge::backends {

/// Computes a response body from a request. Must be a pure function.
using ResponseGenerator = std::function<std::string(const BackendRequest&)>;

/// One matcher -> response rule. A fixture matches when the role matches (if
/// set) and every `contains` string occurs in the request's match_text().
struct Fixture {
  std::optional<Role> role;
  std::vector<std::string> contains;

  // Exactly one of the following responses is used, in this priority.
  std::optional<std::string> reply;          // wrapped per role: {"content"} / {"caption"}
  std::optional<nlohmann::json> body;        // raw wire body
  bool echo = false;                         // reply = digest of the request
  std::string generator;                     // name of a built-in generator
  ResponseGenerator custom;                  // in-process responder
};

/// Ordered fixture list; first match wins.
class FixtureTable {
 public:
  FixtureTable() = default;

  /// {"fixtures": [{"role", "contains", "reply"|"body"|"echo"|"generator"}]}
  static FixtureTable from_json(const nlohmann::json& j);
  static FixtureTable load(const std::filesystem::path& path);
  /// Deterministic responders for every prompt the pipeline issues; used by
  /// `--mock-backends` runs.
  static FixtureTable synthetic();

  FixtureTable& add(Fixture f);
  const Fixture* match(const BackendRequest& req) const;
  std::size_t size() const { return fixtures_.size(); }

 private:
  std::vector<Fixture> fixtures_;
};

/// Names accepted by Fixture::generator.
std::vector<std::string> builtin_generator_names();

/// Side-effect-free backend driven by a fixture table. Unmatched requests
/// raise FixtureMissError naming the request.
class MockTransport : public Transport {
 public:
  explicit MockTransport(FixtureTable table) : table_(std::move(table)) {}
  std::string send(const BackendRequest& req) override;

 private:
  FixtureTable table_;
};

std::shared_ptr<Transport> mock_backend(FixtureTable table);

/// Digest used by echo fixtures.
std::string request_digest(const BackendRequest& req);

}  // namespace adlforge::backends
