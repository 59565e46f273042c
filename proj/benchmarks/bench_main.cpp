#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "adlforge/annotate/llm_parse.hpp"
#include "adlforge/curation/crop.hpp"
#include "adlforge/model/rng.hpp"
#include "adlforge/objects/objects.hpp"

using namespace adlforge;

namespace {

void BM_TrackFeatures(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), frames = 8, dim = kObjectFeatureDim;
  Rng rng(1);
  std::vector<float> data(static_cast<std::size_t>(frames) * n * dim);
  for (auto& x : data) x = static_cast<float>(rng.normal(0, 1));
  const std::vector<std::vector<bool>> present(frames, std::vector<bool>(n, true));
  const bool exclusive = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(objects::track_features(data, dim, frames, n, present, {0.0, exclusive}));
  state.SetItemsProcessed(state.iterations() * (frames - 1) * n * n);
}
BENCHMARK(BM_TrackFeatures)->ArgsProduct({{2, 8, 32}, {0, 1}});

void BM_ParseMapping(benchmark::State& state) {
  const std::vector<std::string> replies = {
      R"([{"Q": "What happens first?", "A": "The person drinks water."}, {"Q": "Then?", "A": "They sit down."}])",
      "Sure! Here you go:\n```json\n[{'Q': 'What happens first?', 'A': 'The person drinks water.'}, {'Q': 'Then?', 'A': 'They sit down.'},]\n```",
      "Here are the pairs:\n[{\"Q\": \"What happens first?\", \"A\": \"The person drinks water.\"}, "
      "{\"Q\": \"Then?\", \"A\": \"They sit down.\"}]\nHope this helps!",
  };
  const auto& reply = replies[static_cast<std::size_t>(state.range(0))];
  for (auto _ : state) benchmark::DoNotOptimize(annotate::parse_llm_mapping(reply, 2));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(reply.size()));
}
BENCHMARK(BM_ParseMapping)->DenseRange(0, 2);

void BM_FrameCrop(benchmark::State& state) {
  Rng rng(3);
  std::vector<PoseFrame> frames(256);
  for (auto& f : frames) {
    Skeleton s;
    for (int j = 0; j < 25; ++j) {
      Joint jt;
      jt.u = rng.uniform01() * 1920;
      jt.v = rng.uniform01() * 1080;
      s.joints.push_back(jt);
    }
    f.persons.push_back(s);
  }
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(curation::frame_crop(frames[i++ % frames.size()], 1920, 1080));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FrameCrop);

}  // namespace
BENCHMARK_MAIN();
