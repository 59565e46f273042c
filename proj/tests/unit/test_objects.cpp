#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>
#include <opencv2/core.hpp>

#include "../common/generators.hpp"
#include "adlforge/model/error.hpp"
#include "adlforge/model/rng.hpp"
#include "adlforge/objects/objects.hpp"
#include "support.hpp"

using namespace adlforge;
using namespace adlforge::objects;
using nlohmann::json;

namespace {

backends::FixtureTable detections(std::vector<std::vector<std::string>> per_call) {
  backends::FixtureTable t;
  backends::Fixture f;
  f.role = backends::Role::detect;
  auto k = std::make_shared<std::size_t>(0);
  f.custom = [per_call, k](const backends::BackendRequest&) {
    return json{{"objects", per_call[(*k)++ % per_call.size()]}}.dump();
  };
  t.add(f);
  return t;
}

std::vector<backends::EncodedImage> images(int count) {
  std::vector<backends::EncodedImage> out;
  for (int i = 0; i < count; ++i) out.push_back({"img" + std::to_string(i)});
  return out;
}

ObjectTrackSet small_set() {
  ObjectTrackSet s;
  s.video_id = "V00003";
  s.clip_id = "C7";
  s.labels = {"bottle", "cup"};
  s.frames = {0, 5};
  s.boxes = {{Box{12, 40, 80, 120}, std::nullopt}, {Box{12.4, 39.6, 80.5, 119.5}, Box{1, 2, 3, 4}}};
  s.features = FeatureMatrix(4, kObjectFeatureDim, FeatureMeta{kProducerObject, "m", "C7"});
  s.features.at(0, 0) = 1;
  s.features.at(2, 0) = 1;
  s.features.at(3, 1) = 1;
  s.links = {{0, std::nullopt}};
  return s;
}

}  // namespace

TEST_SUITE("objects") {

TEST_CASE("uniform sampling of eight frames") {
  CHECK(uniform_sample_indices(16) == std::vector<int>{0, 2, 4, 6, 8, 10, 12, 14});
  CHECK(uniform_sample_indices(3) == std::vector<int>{0, 0, 0, 1, 1, 1, 2, 2});
  CHECK(uniform_sample_indices(100, 4) == std::vector<int>{0, 25, 50, 75});
  CHECK_THROWS_AS(uniform_sample_indices(0), PreconditionError);
}

TEST_CASE("detections are case-folded and merged in first-seen order") {
  testing::TempDir dir;
  testing::MockClient mc(detections({{"Chair", "chair"}, {"table"}}), dir / "c");
  CHECK(detect_objects(images(2), *mc) == std::vector<std::string>{"chair", "table"});
  testing::MockClient empty(detections({{}}), dir / "d");
  CHECK(detect_objects(images(3), *empty).empty());
  CHECK(merge_detections({{"Cup ", "cup"}, {"BOTTLE", "cup"}}) == std::vector<std::string>{"cup", "bottle"});
}

TEST_CASE("detection fails only when every frame fails") {
  testing::TempDir dir;
  backends::FixtureTable t;
  backends::Fixture f;
  f.role = backends::Role::detect;
  auto k = std::make_shared<int>(0);
  f.custom = [k](const backends::BackendRequest&) -> std::string {
    if ((*k)++ == 0) return "not json";
    return json{{"objects", {"lamp"}}}.dump();
  };
  t.add(f);
  testing::MockClient mc(t, dir / "c");
  CHECK(detect_objects(images(2), *mc) == std::vector<std::string>{"lamp"});

  backends::FixtureTable bad;
  backends::Fixture g;
  g.role = backends::Role::detect;
  g.custom = [](const backends::BackendRequest&) -> std::string { return "not json"; };
  bad.add(g);
  testing::MockClient mb(bad, dir / "d");
  CHECK_THROWS_AS(detect_objects(images(2), *mb), Error);
}

TEST_CASE("relevance filtering") {
  testing::TempDir dir;
  const std::vector<std::string> found = {"plant", "chair", "bottle", "table"};
  backends::FixtureTable t;
  t.add(testing::reply_fixture(backends::Role::chat, "Drinking", "bottle"));
  t.add(testing::reply_fixture(backends::Role::chat, "Waving", "None"));
  t.add(testing::reply_fixture(backends::Role::chat, "Pouring", "bottle, goblet"));
  testing::MockClient mc(t, dir / "c");

  CHECK(filter_relevant("Drinking", found, *mc).relevant == std::vector<std::string>{"bottle"});
  CHECK(filter_relevant("Waving", found, *mc).relevant.empty());
  const auto r = filter_relevant("Pouring", found, *mc);
  CHECK(r.relevant == std::vector<std::string>{"bottle"});
  CHECK(r.dropped == std::vector<std::string>{"goblet"});
  const auto calls = mc.calls();
  CHECK(filter_relevant("Drinking", {}, *mc).relevant.empty());
  CHECK(mc.calls() == calls);
}

TEST_CASE("relevance replies never leave the found set") {
  Rng rng(11);
  const std::vector<std::string> vocab = {"cup", "Bottle", "table", "chair", "phone", "goblet", "none", "book"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> found;
    for (const auto& v : vocab)
      if (rng.uniform01() < 0.4 && v != "none") found.push_back(v);
    std::string reply;
    const int k = rng.uniform_int(0, 5);
    for (int i = 0; i < k; ++i) {
      std::string w = vocab[rng.uniform_index(vocab.size())];
      if (rng.uniform01() < 0.3) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
      reply += (i ? (rng.uniform01() < 0.5 ? ", " : "\n") : "") + w;
    }
    const auto r = parse_relevance_reply(reply, found);
    std::set<std::string> seen;
    for (const auto& x : r.relevant) {
      CHECK(std::find(found.begin(), found.end(), x) != found.end());
      CHECK(seen.insert(x).second);
    }
  }
}

TEST_CASE("localization yields unit-norm rows for present objects") {
  testing::TempDir dir;
  testing::MockClient mc(backends::FixtureTable::synthetic(), dir / "c");
  const auto frames_idx = uniform_sample_indices(16);
  std::vector<cv::Mat> frames;
  for (int i = 0; i < 8; ++i) frames.emplace_back(480, 512, CV_8UC3, cv::Scalar(i * 20, 100, 50));
  auto set = localize_and_embed("V1", "C1", frames_idx, frames, {"cup", "table"}, *mc);
  CHECK(set.features.rows() == 16);
  CHECK(set.features.dim() == kObjectFeatureDim);
  CHECK(set.features.meta().producer == kProducerObject);
  for (int t = 0; t < 8; ++t)
    for (int i = 0; i < 2; ++i) {
      const auto row = set.features.row(t * 2 + i);
      const double norm = std::sqrt(std::inner_product(row.begin(), row.end(), row.begin(), 0.0));
      if (set.present(t, i)) {
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-5));
        CHECK((*set.boxes[t][i])[2] <= 512);
        CHECK((*set.boxes[t][i])[3] <= 480);
      } else {
        CHECK(norm == 0.0);
      }
    }
  track_by_similarity(set);
  CHECK_NOTHROW(set.validate());
}

TEST_CASE("tracking small examples") {
  // frame 0: a, b; frame 1: b, a  -> swap
  const std::vector<float> swap = {1, 0, 0, 1, 0, 1, 1, 0};
  const std::vector<std::vector<bool>> all(2, std::vector<bool>(2, true));
  auto links = track_features(swap, 2, 2, 2, all);
  CHECK(links[0][0] == 1);
  CHECK(links[0][1] == 0);

  const std::vector<float> same = {1, 0, 0, 1, 1, 0, 0, 1};
  links = track_features(same, 2, 2, 2, all);
  CHECK(links[0][0] == 0);
  CHECK(links[0][1] == 1);

  // exact tie: lowest successor index
  const std::vector<float> tie = {1, 0, 1, 0, 1, 0, 1, 0};
  links = track_features(tie, 2, 2, 2, all);
  CHECK(links[0][0] == 0);
  CHECK(links[0][1] == 0);
  links = track_features(tie, 2, 2, 2, all, {0.0, true});
  CHECK(links[0][0] == 0);
  CHECK(links[0][1] == 1);

  CHECK_THROWS_AS(track_features(tie, 3, 2, 2, all), PreconditionError);
}

TEST_CASE("tracking matches the brute-force oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = testing::random_track_instance(rng);
    const double min_sim = trial % 3 == 0 ? 0.25 : -1.0;
    const auto got = track_features(inst.data, inst.dim, inst.frames, inst.n, inst.present, {min_sim, false});
    CHECK(got == testing::brute_force_links(inst, min_sim));
  }
}

TEST_CASE("tracking is invariant to a shared rotation of the feature space") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = testing::random_track_instance(rng);
    if (inst.dim < 2) continue;
    // Givens rotation by 90 degrees in the first two coordinates is exact in float.
    auto rotated = inst;
    for (std::size_t r = 0; r < rotated.data.size(); r += inst.dim) {
      rotated.data[r] = -inst.data[r + 1];
      rotated.data[r + 1] = inst.data[r];
    }
    CHECK(track_features(inst.data, inst.dim, inst.frames, inst.n, inst.present) ==
          track_features(rotated.data, inst.dim, inst.frames, inst.n, inst.present));
  }
}

TEST_CASE("exclusive tracking is injective") {
  Rng rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = testing::random_track_instance(rng);
    const auto links = track_features(inst.data, inst.dim, inst.frames, inst.n, inst.present, {-1.0, true});
    for (int t = 0; t + 1 < inst.frames; ++t) {
      std::set<int> targets;
      int linked = 0, from = 0, to = 0;
      for (int i = 0; i < inst.n; ++i) {
        from += inst.present[t][i];
        to += inst.present[t + 1][i];
        if (!links[t][i]) continue;
        ++linked;
        CHECK(inst.present[t][i]);
        CHECK(inst.present[t + 1][*links[t][i]]);
        CHECK(targets.insert(*links[t][i]).second);
      }
      CHECK(linked == std::min(from, to));
    }
  }
}

TEST_CASE("cosine properties") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<float> a(8), b(8);
    for (auto& x : a) x = static_cast<float>(rng.normal(0, 1));
    for (auto& x : b) x = static_cast<float>(rng.normal(0, 1));
    const double ab = cosine(a, b);
    CHECK(ab == doctest::Approx(cosine(b, a)));
    CHECK(ab <= 1.0 + 1e-12);
    CHECK(ab >= -1.0 - 1e-12);
    CHECK(cosine(a, a) == doctest::Approx(1.0));
    std::vector<float> scaled = a;
    for (auto& x : scaled) x *= 4.0f;
    CHECK(cosine(scaled, b) == doctest::Approx(ab));
  }
  const std::vector<float> zero(8, 0.0f), one(8, 1.0f);
  CHECK(cosine(zero, one) == 0.0);
}

TEST_CASE("object QA and context") {
  const auto set = small_set();
  const auto cues = object_qa_and_context(set);
  REQUIRE(cues.qa.size() == 2);
  CHECK(cues.qa[0].question == "What are the relevant objects in the scene?");
  CHECK(cues.qa[0].answer == "bottle, cup");
  CHECK(cues.qa[1].question == "What is the object in the trajectory [12,40,80,120]?");
  CHECK(cues.qa[1].answer == "bottle");
  CHECK(cues.qa[1].source == QaSource::template_);
  CHECK(cues.context == "The relevant objects in the video are: bottle, cup");
  CHECK(object_context({"cup", "table"}) == "The relevant objects in the video are: cup, table");
  CHECK(format_box({0.4, 0.6, 10.5, 99.49}) == "[0,1,11,99]");
  ObjectTrackSet none = set;
  none.labels.clear();
  CHECK_THROWS_AS(object_qa_and_context(none), PreconditionError);
}

TEST_CASE("track sets round-trip through files") {
  testing::TempDir dir;
  const auto set = small_set();
  write_trackset(set, dir.path());
  const auto back = read_trackset(dir / "C7.json");
  CHECK(back.labels == set.labels);
  CHECK(back.frames == set.frames);
  CHECK(back.boxes == set.boxes);
  CHECK(back.links == set.links);
  CHECK(back.features.bit_equal(set.features));
  CHECK(track_to_json(back) == track_to_json(set));
}

}  // TEST_SUITE
