#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adlforge/annotate/prompts.hpp"
#include "adlforge/app/config.hpp"
#include "adlforge/backends/client.hpp"
#include "adlforge/backends/mock.hpp"
#include "adlforge/curation/codec.hpp"
#include "adlforge/eval/mcq.hpp"
#include "adlforge/model/error.hpp"

namespace adlforge::app {

/// A stage failed; `stage()` names it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what) : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Codec, backend client and prompts shared by the stages of one run.
class Runtime {
 public:
  /// Builds the backend from `config`: mock responders when
  /// `mock_backends` (network disabled), HTTP when URLs are configured,
  /// otherwise a transport that refuses every call. `transport` replaces
  /// the configured one when given.
  explicit Runtime(RunConfig config, std::shared_ptr<curation::VideoCodec> codec = nullptr,
                   std::shared_ptr<backends::Transport> transport = nullptr);

  const RunConfig& config() const { return config_; }
  curation::VideoCodec& codec() { return *codec_; }
  backends::BackendClient& client() { return *client_; }
  const backends::CountingTransport& counter() const { return *counter_; }
  const annotate::PromptLibrary& prompts() const { return prompts_; }

 private:
  RunConfig config_;
  std::shared_ptr<curation::VideoCodec> codec_;
  std::unique_ptr<backends::RateLimiter> limiter_;
  std::shared_ptr<backends::CountingTransport> counter_;
  std::unique_ptr<backends::BackendClient> client_;
  annotate::PromptLibrary prompts_;
};

/// Fixture table for mock runs: the optional fixture file first, then the
/// synthetic responders.
backends::FixtureTable mock_fixtures(const RunConfig& config);

// Each stage writes its artifacts plus one provenance record into `out` and
// returns a small JSON summary. Failures surface as StageError.

nlohmann::json stage_synth_corpus(Runtime& rt, const std::filesystem::path& out);
/// Per-clip crop boxes of a corpus (`crops.jsonl`).
nlohmann::json stage_crop(Runtime& rt, const std::filesystem::path& corpus, const std::filesystem::path& out);
nlohmann::json stage_package_features(Runtime& rt, const std::vector<std::filesystem::path>& inputs,
                                      const std::filesystem::path& out, const std::string& model_id);
nlohmann::json stage_sequences(Runtime& rt, const std::filesystem::path& out);
nlohmann::json stage_stitch(Runtime& rt, const std::filesystem::path& corpus, const std::filesystem::path& sequences,
                            const std::filesystem::path& out);
nlohmann::json stage_caption(Runtime& rt, const std::filesystem::path& stitched, const std::filesystem::path& out);
nlohmann::json stage_describe(Runtime& rt, const std::filesystem::path& stitched, const std::filesystem::path& captions,
                              const std::filesystem::path& out);
nlohmann::json stage_posecues(Runtime& rt, const std::filesystem::path& stitched, const std::filesystem::path& corpus,
                              const std::filesystem::path& out);
nlohmann::json stage_objects(Runtime& rt, const std::filesystem::path& stitched, const std::filesystem::path& out);
/// Re-links existing track sets with the configured tracking options.
nlohmann::json stage_track(Runtime& rt, const std::filesystem::path& objects, const std::filesystem::path& out);
nlohmann::json stage_qagen(Runtime& rt, const std::filesystem::path& stitched, const std::filesystem::path& describe,
                           const std::filesystem::path& posecues, const std::filesystem::path& objects,
                           const std::filesystem::path& out);
nlohmann::json stage_build_mcq(Runtime& rt, const std::filesystem::path& stitched, const std::filesystem::path& out);
nlohmann::json stage_score_mcq(Runtime& rt, const std::filesystem::path& items, const std::filesystem::path& answers,
                               const std::filesystem::path& out);
/// `pairs`: JSON Lines of {"item_id", "generated", "reference"}.
nlohmann::json stage_eval_desc(Runtime& rt, const std::filesystem::path& pairs, const std::filesystem::path& out);
nlohmann::json stage_eval_mementos(Runtime& rt, const std::filesystem::path& pairs, const std::filesystem::path& out);

/// Every stage above into `run_dir`, synthesizing a corpus unless the
/// config names one. Writes summary.json and a top-level provenance record.
nlohmann::json run_pipeline(Runtime& rt, const std::filesystem::path& run_dir);

}  // namespace adlforge::app
