// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "../common/generators.hpp"
#include "../common/golden.hpp"
#include "../common/parse_corpus.hpp"
#include "adlforge/backends/cache.hpp"
#include "adlforge/backends/client.hpp"
#include "adlforge/backends/mock.hpp"
#include "adlforge/curation/crop.hpp"
#include "adlforge/eval/judge.hpp"
#include "adlforge/eval/mcq.hpp"
#include "adlforge/eval/mementos.hpp"
#include "adlforge/model/manifest.hpp"
#include "adlforge/objects/objects.hpp"
#include "adlforge/pose/pose_cues.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace adlforge;

namespace {

struct Verdict {
  bool ok = true;
  std::vector<std::string> notes;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back(what);
    }
  }
};

struct CliRun {
  int code = -1;
  double seconds = 0;
  json summary;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const auto t0 = std::chrono::steady_clock::now();
  CliRun r;
  r.code = cli::run_cli(args, out, err);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.err = err.str();
  if (r.code == 0) r.summary = json::parse(out.str(), nullptr, false);
  return r;
}

CliRun pipeline(const fs::path& out, const fs::path& cache) {
  return run_cli({"--mock-backends", "--log-level", "error", "--overwrite", "--out", out.string(), "--cache-dir",
                  cache.string(), "pipeline"});
}

std::vector<json> read_jsonl(const fs::path& p) {
  std::vector<json> out;
  std::istringstream in(read_file(p));
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

/// Relative path -> bytes of every artifact except run records that embed
/// paths or timings.
std::map<std::string, std::string> artifact_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto name = e.path().filename().string();
    if (name == "provenance.json" || name == "summary.json") continue;
    out[fs::relative(e.path(), dir).generic_string()] = read_file(e.path());
  }
  return out;
}

struct Pipelines {
  fs::path work;
  CliRun first, second, warm;
  bool ran = false;
};

// --- criteria ---------------------------------------------------------------

Verdict dataset_stats(Pipelines& p) {
  Verdict v;
  p.first = pipeline(p.work / "runA", p.work / "cacheA");
  p.ran = true;
  v.require(p.first.code == 0, "pipeline exit " + std::to_string(p.first.code) + ": " + p.first.err.substr(0, 300));
  if (!v.ok) return v;
  v.notes.push_back(fmt::format("runtime {:.1f}s", p.first.seconds));
  v.require(p.first.seconds < 120.0, fmt::format("pipeline took {:.1f}s (limit 120s)", p.first.seconds));

  const auto stitched = read_jsonl(p.work / "runA" / "stitched" / "stitched.jsonl");
  double total = 0;
  for (const auto& s : stitched) total += static_cast<double>(s.at("segments").size());
  const double mean = stitched.empty() ? 0 : total / static_cast<double>(stitched.size());
  v.notes.push_back(fmt::format("{} videos, mean {:.2f} actions", stitched.size(), mean));
  v.require(stitched.size() == 100, "expected 100 stitched videos");
  v.require(mean >= 4.5 && mean <= 5.5, fmt::format("mean actions {:.2f} outside [4.5, 5.5]", mean));

  std::map<std::string, std::map<std::string, int>> per_video;
  for (const auto& q : read_jsonl(p.work / "runA" / "qa" / "qa.jsonl"))
    ++per_video[q.at("video_id").get<std::string>()][q.at("qtype").get<std::string>()];
  int bad = 0;
  for (const auto& s : stitched) {
    auto& c = per_video[s.at("video_id").get<std::string>()];
    const int base = c["dense_description"] + c["summary"] + c["detail"];
    const int all = base + c["pose_qa"] + c["object_qa"];
    if (base != 7 || all != 11) ++bad;
  }
  v.require(bad == 0, fmt::format("{} videos without 7 base / 11 total QA pairs", bad));

  const auto val = run_cli({"--log-level", "error", "validate", "--media", (p.work / "runA").string()});
  v.require(val.code == 0, "validate failed: " + val.err.substr(0, 300));
  return v;
}

Verdict tracking() {
  Verdict v;
  Rng rng(1000);
  int mismatches = 0, injective_violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto inst = testing::random_track_instance(rng);
    const double min_sim = trial % 2 ? 0.3 : -1.0;
    if (objects::track_features(inst.data, inst.dim, inst.frames, inst.n, inst.present, {min_sim, false}) !=
        testing::brute_force_links(inst, min_sim))
      ++mismatches;
    const auto ex = objects::track_features(inst.data, inst.dim, inst.frames, inst.n, inst.present, {min_sim, true});
    for (const auto& step : ex) {
      std::set<int> seen;
      for (const auto& l : step)
        if (l && !seen.insert(*l).second) ++injective_violations;
    }
  }
  v.notes.push_back("1000 random instances");
  v.require(mismatches == 0, fmt::format("{} instances differ from the brute-force oracle", mismatches));
  v.require(injective_violations == 0, fmt::format("{} exclusive links reuse a target", injective_violations));
  return v;
}

Verdict relevance(const fs::path& work) {
  Verdict v;
  backends::FixtureTable t;
  backends::Fixture drinking;
  drinking.role = backends::Role::chat;
  drinking.contains = {"Drinking"};
  drinking.reply = "bottle";
  t.add(drinking);
  backends::Fixture none;
  none.role = backends::Role::chat;
  none.contains = {"Waving"};
  none.reply = "None";
  t.add(none);
  backends::RateLimiter limiter;
  backends::BackendClient client(backends::mock_backend(t), std::make_shared<backends::ResponseCache>(work / "rel-cache"),
                                 {}, &limiter);
  const std::vector<std::string> found = {"plant", "chair", "bottle", "table"};
  const auto r = objects::filter_relevant("Drinking", found, client);
  v.require(r.relevant == std::vector<std::string>{"bottle"}, "Drinking did not reduce to [bottle]");
  v.require(objects::filter_relevant("Waving", found, client).relevant.empty(), "'None' reply not mapped to []");
  return v;
}

Verdict prompt_goldens() {
  Verdict v;
  int n = 0;
  for (const auto& g : testing::check_goldens(ADLFORGE_TEST_DATA_DIR "/golden")) {
    ++n;
    v.require(g.ok, g.name + " differs from its golden file");
  }
  int on_disk = 0;
  for (const auto& e : fs::directory_iterator(ADLFORGE_TEST_DATA_DIR "/golden"))
    on_disk += e.path().filename() != "inputs.json";
  v.require(n == on_disk && n > 0, fmt::format("{} golden files on disk, checked {}", on_disk, n));
  using pose::PeripheralJoint;
  const std::vector<pose::PeripheralJointTrace> traces = {
      {PeripheralJoint::head, {{112, 40}}},      {PeripheralJoint::right_hand, {{87, 162}}},
      {PeripheralJoint::left_hand, {{134, 49}}}, {PeripheralJoint::right_knee, {{104, 201}}},
      {PeripheralJoint::left_knee, {{106, 197}}},
  };
  v.require(pose::build_pose_str(traces) ==
                "In observation 0, the right knee is at (104, 201) and the left knee is at (106, 197) and the right "
                "hand is at (87, 162) and the left hand is at (134, 49) and the head is at (112, 40).",
            "pose string sentence differs");
  v.notes.push_back(fmt::format("{} golden files", n));
  return v;
}

Verdict mcq() {
  Verdict v;
  const std::vector<std::string> vocab = {"drink water", "eat meal", "brushing teeth", "drop", "pickup",
                                          "throw", "sitting down", "standing up", "reading", "writing"};
  Rng rng(77);
  std::vector<StitchedVideo> videos;
  for (int i = 0; i < 500; ++i) {
    StitchedVideo s;
    s.video_id = fmt::format("V{:05d}", i);
    int frame = 0;
    for (int k = rng.uniform_int(3, 7); k > 0; --k) {
      const int a = rng.uniform_int(0, 9);
      s.segments.push_back({"c", a + 1, vocab[a], frame, frame + 30});
      frame += 30;
    }
    videos.push_back(s);
  }
  auto items = eval::build_mcq(videos, vocab, eval::McqTask::AR);
  const auto af = eval::build_mcq(videos, vocab, eval::McqTask::AF);
  items.insert(items.end(), af.begin(), af.end());
  auto letter = [](int i) { return std::string(1, static_cast<char>('A' + i)); };
  std::vector<std::string> oracle, anti;
  for (const auto& it : items) {
    oracle.push_back(letter(it.correct_index));
    anti.push_back(letter((it.correct_index + 1) % static_cast<int>(it.options.size())));
  }
  v.require(eval::score_mcq(items, oracle).accuracy == 100.0, "oracle answerer below 100%");
  v.require(eval::score_mcq(items, anti).accuracy == 0.0, "anti-oracle answerer above 0%");

  std::vector<eval::McqItem> many;
  std::vector<std::string> guesses;
  while (many.size() < 10000)
    for (const auto& it : items) {
      if (many.size() == 10000) break;
      many.push_back(it);
      guesses.push_back(letter(rng.uniform_int(0, 3)));
    }
  const double acc = eval::score_mcq(many, guesses).accuracy;
  const double sigma = 100.0 * std::sqrt(0.25 * 0.75 / 10000.0);
  v.require(std::abs(acc - 25.0) <= 3 * sigma, fmt::format("random answerer {:.2f}% outside 25 +/- {:.2f}", acc, 3 * sigma));
  v.notes.push_back(fmt::format("random answerer {:.2f}% over 10000 items", acc));

  int changed = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto s = items[i];
    std::vector<int> perm(s.options.size());
    for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = static_cast<int>(k);
    rng.shuffle(std::span<int>(perm));
    for (std::size_t k = 0; k < perm.size(); ++k) s.options[k] = items[i].options[perm[k]];
    s.correct_index = static_cast<int>(std::find(perm.begin(), perm.end(), items[i].correct_index) - perm.begin());
    const auto& reply = items[i].options[rng.uniform_index(perm.size())];
    if (eval::score_mcq({items[i]}, {reply}).correct != eval::score_mcq({s}, {reply}).correct) ++changed;
  }
  v.require(changed == 0, fmt::format("{} verdicts change under option shuffling", changed));
  return v;
}

Verdict crop() {
  Verdict v;
  Rng rng(10000);
  int violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int w = rng.uniform_int(40, 1920), h = rng.uniform_int(40, 1080);
    const auto f = testing::random_pose_frame(rng, w, h);
    const auto box = curation::frame_crop(f, w, h, {0.2, 32});
    const auto ext = testing::joint_extent(f, w, h);
    if (box.has_value() != ext.has_value()) {
      ++violations;
      continue;
    }
    if (!box) continue;
    if (!box->valid() || box->x1 < 0 || box->y1 < 0 || box->x2 > w || box->y2 > h) ++violations;
    for (const auto& person : f.persons)
      for (const auto& j : person.joints)
        if (testing::in_frame(j, w, h) && !curation::contains_point(*box, j.u, j.v)) ++violations;
  }
  v.require(violations == 0, fmt::format("{} containment or bounds violations", violations));
  PoseFrame f;
  Skeleton s;
  Joint a, b;
  a.u = 10, a.v = 20, b.u = 30, b.v = 60;
  s.joints = {a, b};
  f.persons = {s};
  v.require(curation::frame_crop(f, 100, 100, {0.2, 32}) == CropBox{6, 12, 34, 68, 100, 100},
            "hand-computed box differs from (6,12,34,68)");
  v.notes.push_back("10000 random frames");
  return v;
}

Verdict parser() {
  Verdict v;
  const auto results = testing::run_parse_corpus(ADLFORGE_TEST_DATA_DIR "/fixtures/parse_corpus.json");
  int passed = 0;
  for (const auto& r : results) {
    passed += r.ok;
    v.require(r.ok, r.id + ": " + r.detail);
  }
  v.require(results.size() == 30, fmt::format("corpus has {} cases, expected 30", results.size()));
  v.notes.push_back(fmt::format("{}/{} cases", passed, results.size()));
  return v;
}

Verdict determinism(Pipelines& p) {
  Verdict v;
  v.require(p.ran && p.first.code == 0, "first pipeline run unavailable");
  if (!v.ok) return v;
  p.second = pipeline(p.work / "runB", p.work / "cacheB");
  v.require(p.second.code == 0, "second run failed: " + p.second.err.substr(0, 300));
  if (!v.ok) return v;
  const auto a = artifact_bytes(p.work / "runA"), b = artifact_bytes(p.work / "runB");
  int differing = 0;
  for (const auto& [name, bytes] : a) {
    auto it = b.find(name);
    if (it == b.end() || it->second != bytes) {
      if (differing < 3) v.notes.push_back("differs: " + name);
      ++differing;
    }
  }
  v.require(a.size() == b.size() && differing == 0, fmt::format("{} of {} artifacts differ", differing, a.size()));
  v.notes.push_back(fmt::format("{} artifacts identical", a.size()));

  p.warm = pipeline(p.work / "runC", p.work / "cacheA");
  v.require(p.warm.code == 0, "warm-cache run failed: " + p.warm.err.substr(0, 300));
  if (p.warm.code == 0) {
    const auto calls = p.warm.summary.at("backend").at("transport_calls").get<long long>();
    v.require(calls == 0, fmt::format("warm-cache run made {} transport calls", calls));
    v.notes.push_back(fmt::format("warm rerun: {} transport calls", calls));
  }
  return v;
}

Verdict metrics(const fs::path& work) {
  Verdict v;
  const auto vocab = eval::KeywordVocab::builtin();
  const auto half = eval::mementos_f1("The person drinks from a cup.", "A man drinks from a bottle.", vocab);
  v.require(std::abs(half.overall.precision - 0.5) < 1e-12 && std::abs(half.overall.recall - 0.5) < 1e-12 &&
                std::abs(half.overall.f1 - 0.5) < 1e-12,
            "P=R=0.5 example does not give F1 0.5");
  const std::string text = "She opens the fridge and pours milk into a glass, then sits on the chair.";
  v.require(eval::mementos_f1(text, text, vocab).overall.f1 == 1.0, "identical descriptions do not give F1 1.0");
  for (int s = 1; s <= 5; ++s) {
    backends::FixtureTable t;
    backends::Fixture f;
    f.role = backends::Role::chat;
    f.reply = std::to_string(s);
    t.add(f);
    backends::RateLimiter limiter;
    backends::BackendClient client(backends::mock_backend(t),
                                   std::make_shared<backends::ResponseCache>(work / ("judge-cache-" + std::to_string(s))),
                                   {}, &limiter);
    const auto corpus = eval::judge_corpus({{"a", "gen", "ref"}, {"b", "gen 2", "ref 2"}}, client);
    for (const auto& [key, mean] : corpus.mean)
      v.require(mean == 20.0 * s, fmt::format("judge score {} gives {} {} (expected {})", s, key, mean, 20 * s));
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adlforge acceptance checks"};
  std::string work = "acceptance-work";
  std::vector<std::string> only;
  app.add_option("--work-dir", work, "Scratch directory for pipeline runs");
  app.add_option("--only", only, "Run only the named criteria");
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::err);

  Pipelines pipes;
  pipes.work = fs::absolute(work);
  fs::remove_all(pipes.work);
  fs::create_directories(pipes.work);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"dataset-stats", [&] { return dataset_stats(pipes); }},
      {"object-tracking", [] { return tracking(); }},
      {"relevance-filter", [&] { return relevance(pipes.work); }},
      {"prompt-templates", [] { return prompt_goldens(); }},
      {"mcq-scoring", [] { return mcq(); }},
      {"person-crop", [] { return crop(); }},
      {"lenient-parser", [] { return parser(); }},
      {"determinism-and-cache", [&] { return determinism(pipes); }},
      {"description-metrics", [&] { return metrics(pipes.work); }},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.ok = false;
      v.notes.push_back(std::string("exception: ") + e.what());
    }
    std::string detail;
    for (const auto& n : v.notes) detail += (detail.empty() ? "" : "; ") + n;
    std::cout << (v.ok ? "[PASS] " : "[FAIL] ") << name << (detail.empty() ? "" : " (" + detail + ")") << std::endl;
    failed += !v.ok;
  }
  return failed ? 1 : 0;
}
