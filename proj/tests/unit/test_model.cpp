#include <doctest.h>

#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "adlforge/curation/codec.hpp"
#include "adlforge/curation/synthetic.hpp"
#include "adlforge/model/action_vocab.hpp"
#include "adlforge/model/error.hpp"
#include "adlforge/model/feature_matrix.hpp"
#include "adlforge/model/hashing.hpp"
#include "adlforge/model/json_io.hpp"
#include "adlforge/model/manifest.hpp"
#include "adlforge/model/parallel.hpp"
#include "adlforge/model/rng.hpp"
#include "support.hpp"

using namespace adlforge;
using nlohmann::json;

namespace {

ClipRecord clip(const std::string& id, int action, const ActionVocabulary& vocab) {
  ClipRecord c;
  c.clip_id = id;
  c.subject_id = "S001";
  c.camera_id = "C001";
  c.action_id = action;
  c.action_label = vocab.label(action);
  c.video_path = "clips/" + id + ".avi";
  c.num_frames = 30;
  c.fps = 30.0;
  return c;
}

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p);
  for (const auto& l : lines) out << l << "\n";
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("corpus manifest keeps file order") {
  testing::TempDir dir;
  const auto vocab = ActionVocabulary::builtin();
  std::vector<std::string> lines;
  for (auto [id, a] : std::vector<std::pair<std::string, int>>{{"S001C001P001R001A003", 3},
                                                               {"S001C001P001R001A001", 1},
                                                               {"S001C001P001R001A002", 2}})
    lines.push_back(json(clip(id, a, vocab)).dump());
  write_lines(dir / "corpus.jsonl", lines);
  const auto got = load_corpus_manifest(dir / "corpus.jsonl", vocab);
  REQUIRE(got.size() == 3);
  CHECK(got[0].action_id == 3);
  CHECK(got[1].action_id == 1);
  CHECK(got[2].action_id == 2);
}

TEST_CASE("duplicate clip ids cite both lines") {
  testing::TempDir dir;
  const auto vocab = ActionVocabulary::builtin();
  std::vector<std::string> lines;
  for (int i = 1; i <= 5; ++i) {
    const std::string id = (i == 2 || i == 5) ? "S001C001A001R001" : "S001C001A00" + std::to_string(i) + "R009";
    lines.push_back(json(clip(id, i, vocab)).dump());
  }
  write_lines(dir / "corpus.jsonl", lines);
  const auto msg = error_of([&] { load_corpus_manifest(dir / "corpus.jsonl", vocab); });
  CHECK(msg.find("S001C001A001R001") != std::string::npos);
  CHECK(msg.find("lines 2 and 5") != std::string::npos);
}

TEST_CASE("malformed and unknown-action lines are rejected with their line number") {
  testing::TempDir dir;
  const auto vocab = ActionVocabulary::builtin();
  write_lines(dir / "a.jsonl", {json(clip("A", 1, vocab)).dump(), "{not json"});
  CHECK(error_of([&] { load_corpus_manifest(dir / "a.jsonl", vocab); }).find("line 2") != std::string::npos);

  auto bad = json(clip("B", 1, vocab));
  bad["action_id"] = 999;
  write_lines(dir / "b.jsonl", {bad.dump()});
  CHECK_THROWS_AS(load_corpus_manifest(dir / "b.jsonl", vocab), ManifestError);
}

TEST_CASE("synthetic corpus manifest histogram equals the generator's") {
  testing::TempDir dir;
  const auto vocab = ActionVocabulary::builtin();
  curation::MemoryCodec codec;
  curation::SyntheticCorpusOptions opt;
  opt.min_frames = opt.max_frames = 2;
  opt.width = 64;
  opt.height = 48;
  const auto generated = curation::write_synthetic_corpus(dir.path(), vocab, opt, codec);
  const auto loaded = load_corpus_manifest(dir / "corpus.jsonl", vocab);
  REQUIRE(loaded.size() == 960);
  std::map<int, int> expected, got;
  for (const auto& c : generated) ++expected[c.action_id];
  for (const auto& c : loaded) ++got[c.action_id];
  CHECK(expected == got);
  CHECK(got.size() == 120);
}

TEST_CASE("corpus manifest round-trips generated records") {
  const auto vocab = ActionVocabulary::builtin();
  Rng rng(11);
  testing::TempDir dir;
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<ClipRecord> clips;
    const int n = rng.uniform_int(0, 12);
    for (int i = 0; i < n; ++i) {
      auto c = clip("C" + std::to_string(trial) + "_" + std::to_string(i), rng.uniform_int(1, 120), vocab);
      c.num_frames = rng.uniform_int(1, 500);
      c.fps = 5.0 + rng.uniform01() * 25.0;
      if (rng.uniform01() < 0.5) c.pose_path = "poses/" + c.clip_id + ".json";
      clips.push_back(c);
    }
    write_corpus_manifest(dir / "c.jsonl", clips);
    CHECK(load_corpus_manifest(dir / "c.jsonl", vocab) == clips);
  }
}

TEST_CASE("feature matrices round-trip bit-exactly") {
  testing::TempDir dir;
  SUBCASE("zero row") {
    FeatureMatrix m(1, 512, {kProducerObject, "m", "V00001"});
    write_feature_matrix(m, dir / "z");
    CHECK(read_feature_matrix(dir / "z").bit_equal(m));
  }
  SUBCASE("single-element probe") {
    FeatureMatrix m(8, 512, {kProducerObject, "m", "V00001"});
    m.at(5, 311) = 42.5f;
    write_feature_matrix(m, dir / "p");
    const auto back = read_feature_matrix(dir / "p.f32");
    CHECK(back.at(5, 311) == 42.5f);
    CHECK(back.meta() == m.meta());
  }
  SUBCASE("special values") {
    FeatureMatrix m(2, 4);
    m.at(0, 0) = -0.0f;
    m.at(0, 1) = std::numeric_limits<float>::denorm_min();
    m.at(0, 2) = std::numeric_limits<float>::max();
    m.at(1, 3) = -1e-30f;
    write_feature_matrix(m, dir / "s");
    const auto back = read_feature_matrix(dir / "s.json");
    CHECK(back.bit_equal(m));
    CHECK(std::signbit(back.at(0, 0)));
    FeatureMatrix plus_zero(2, 4);
    plus_zero.at(0, 1) = std::numeric_limits<float>::denorm_min();
    plus_zero.at(0, 2) = std::numeric_limits<float>::max();
    plus_zero.at(1, 3) = -1e-30f;
    CHECK_FALSE(back.bit_equal(plus_zero));
  }
  SUBCASE("shape mismatch") {
    FeatureMatrix m(3, 4);
    write_feature_matrix(m, dir / "x");
    std::filesystem::resize_file(dir / "x.f32", 3 * 4 * 4 - 4);
    CHECK_THROWS_AS(read_feature_matrix(dir / "x"), ManifestError);
  }
  SUBCASE("missing file") { CHECK_THROWS(read_feature_matrix(dir / "absent")); }
}

TEST_CASE("producer dimensions are enforced") {
  CHECK_THROWS_AS(FeatureMatrix(4, 128, {kProducerPose, "", ""}).validate(), ValidationError);
  CHECK_NOTHROW(FeatureMatrix(4, kPoseFeatureDim, {kProducerPose, "", ""}).validate());
  CHECK_THROWS_AS(FeatureMatrix(4, 216, {kProducerObject, "", ""}).validate(), ValidationError);
}

TEST_CASE("stitched tiling violations name video and segment") {
  StitchedVideo v;
  v.video_id = "V00042";
  v.subject_id = "S001";
  v.camera_id = "C001";
  v.fps = 10;
  v.segments = {{"a", 1, "drink water", 0, 60}, {"b", 2, "eat meal", 60, 150}, {"c", 3, "brush teeth", 150, 195}};
  CHECK_NOTHROW(validate_stitched(v));
  CHECK(v.total_frames() == 195);

  auto gap = v;
  gap.segments[1].start_frame = 61;
  const auto msg = error_of([&] { validate_stitched(gap); });
  CHECK(msg.find("V00042") != std::string::npos);
  CHECK(msg.find("segment 1") != std::string::npos);

  auto empty = v;
  empty.segments[2].end_frame = 150;
  CHECK_THROWS_AS(validate_stitched(empty), ValidationError);

  auto bad_crop = v;
  bad_crop.crop_box = CropBox{0, 0, 700, 10, 640, 480};
  CHECK_THROWS_AS(validate_stitched(bad_crop), ValidationError);
}

TEST_CASE("qa pair context prefix rule") {
  QaPair q{"V1", "What happens?", "A person drinks.", QaType::summary, QaSource::llm, std::nullopt};
  CHECK_NOTHROW(validate_qa_pair(q));
  auto aug = q;
  aug.qtype = QaType::pose_context_augmented;
  CHECK_THROWS_AS(validate_qa_pair(aug), ValidationError);
  aug.context_prefix = "Head: still.";
  aug.question = "Head: still. What happens?";
  CHECK_NOTHROW(validate_qa_pair(aug));
  aug.question = "What happens?";
  CHECK_THROWS_AS(validate_qa_pair(aug), ValidationError);
  auto empty = q;
  empty.answer = "";
  CHECK_THROWS_AS(validate_qa_pair(empty), ValidationError);
  for (auto t : {QaType::dense_description, QaType::object_context_augmented, QaType::pose_qa})
    CHECK(qa_type_from_string(to_string(t)) == t);
}

TEST_CASE("hashing helpers") {
  CHECK(sha256_hex(std::string_view("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(base64_encode(std::string_view("hello")) == "aGVsbG8=");
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(derive_seed(7, 1) == derive_seed(7, 1));
  CHECK(derive_seed(7, 1) != derive_seed(7, 2));
  CHECK(derive_seed(7, 1) != derive_seed(8, 1));
}

TEST_CASE("rng draws stay in range and are reproducible") {
  Rng a(5), b(5);
  for (int i = 0; i < 1000; ++i) {
    const int x = a.uniform_int(-3, 3);
    CHECK(x == b.uniform_int(-3, 3));
    CHECK(x >= -3);
    CHECK(x <= 3);
    const double u = a.uniform01();
    b.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("parallel_for fills per-index slots and rethrows the lowest failure") {
  std::vector<int> out(200, -1);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  try {
    parallel_for(50, 3, [](std::size_t i) {
      if (i == 17 || i == 40) throw std::runtime_error("fail " + std::to_string(i));
    });
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "fail 17");
  }
}

TEST_CASE("action vocabulary") {
  const auto v = ActionVocabulary::builtin();
  CHECK(v.size() == 120);
  CHECK(v.label(1) == "drink water");
  CHECK(v.id_for_label("drink water") == 1);
  CHECK_FALSE(v.contains(0));
}

}  // TEST_SUITE
