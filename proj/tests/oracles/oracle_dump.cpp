// Writes artifacts whose encoding is checked by independent Python readers:
// a feature pair with the expected bit pattern of every value, and backend
// requests with their cache keys.
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include <nlohmann/json.hpp>

#include "adlforge/backends/request.hpp"
#include "adlforge/model/feature_matrix.hpp"
#include "adlforge/model/hashing.hpp"
#include "adlforge/model/manifest.hpp"
#include "adlforge/model/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace adlforge;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: adlforge_oracle_dump <dir>\n";
    return 2;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir);

  Rng rng(31337);
  FeatureMatrix m(37, kPoseFeatureDim, FeatureMeta{kProducerPose, "oracle-model", "P0037"});
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.dim(); ++c) m.at(r, c) = static_cast<float>(rng.normal(0, 3));
  m.at(0, 0) = -0.0f;
  m.at(0, 1) = std::numeric_limits<float>::denorm_min();
  m.at(0, 2) = std::numeric_limits<float>::max();
  m.at(36, 215) = 1.0f;
  write_feature_matrix(m, dir / "features");
  json bits = json::array();
  for (float v : m.data()) {
    std::uint32_t u;
    std::memcpy(&u, &v, sizeof u);
    bits.push_back(u);
  }
  write_file_atomic(dir / "features.expected.json",
                    json{{"rows", m.rows()}, {"dim", m.dim()}, {"bits", bits}, {"meta", {{"producer", kProducerPose},
                                                                                          {"model_id", "oracle-model"},
                                                                                          {"subject_id", "P0037"}}}}
                        .dump());

  std::ofstream out(dir / "requests.jsonl", std::ios::binary);
  auto emit = [&](const backends::BackendRequest& req) {
    json media = json::array();
    for (const auto& e : req.media) media.push_back(base64_encode(e.bytes));
    out << json{{"role", backends::to_string(req.role)}, {"model_id", req.model_id}, {"payload", req.payload},
                {"media", media}, {"cache_key", req.cache_key()}}
               .dump()
        << '\n';
  };
  using backends::Role;
  backends::BackendRequest req;
  req.role = Role::chat;
  req.payload = {{"messages", {{{"role", "user"}, {"content", "Describe the café scene, naïvely (über ✓)"}}}},
                 {"temperature", 0.0},
                 {"max_tokens", 1024}};
  emit(req);
  req.model_id = "chat-model-b";
  req.payload["temperature"] = 0.7;
  emit(req);
  req = {};
  req.role = Role::caption;
  req.payload = {{"prompt", "Describe the image."}, {"frame_index", 12}};
  req.media = {{std::string("\x89PNG\r\n\x1a\n\0\1", 10)}};
  emit(req);
  req = {};
  req.role = Role::detect;
  req.media = {{"frame-a"}, {"frame-b"}, {"frame-c"}};
  emit(req);
  req = {};
  req.role = Role::localize;
  req.payload = {{"labels", {"cup", "table"}}, {"nested", {{"z", 1}, {"a", {true, nullptr, "x\"y\\"}}}}};
  req.media = {{"jpeg-bytes"}};
  emit(req);
  for (int i = 0; i < 20; ++i) {
    req = {};
    req.role = static_cast<Role>(rng.uniform_int(0, 3));
    req.payload = {{"k" + std::to_string(rng.uniform_int(0, 99)), rng.uniform_int(-1000, 1000)},
                   {"text", std::string(static_cast<std::size_t>(rng.uniform_int(0, 12)), 'a' + static_cast<char>(i % 26))},
                   {"scale", rng.uniform_int(0, 1000) / 8.0}};
    if (rng.uniform01() < 0.5) req.media.push_back({"img" + std::to_string(i)});
    emit(req);
  }
  return 0;
}
