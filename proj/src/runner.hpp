// Copyright 2026 The Intentsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INTENTSYNTH_RUNNER_HPP
#define INTENTSYNTH_RUNNER_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "backends.hpp"
#include "corpus.hpp"
#include "evalkit.hpp"
#include "genkit.hpp"
#include "refiner.hpp"
#include "splitter.hpp"

namespace intentsynth {

inline constexpr const char* kVersion = "0.1.0";

struct GenerationConfig {
  int max_retries = 3;
  int max_new_tokens = 256;
  double temperature = 1.0;
  int oversample_factor = 10;
};

struct CustomPlanConfig {
  int n_unseen = 1;
  int n_val = 1;
  int per_intent_generation_count = 100;
};

// Declarative run description. Loaded from one JSON file; only remote-backend
// secrets may come from the environment.
struct PipelineConfig {
  DatasetName dataset = DatasetName::Custom;
  std::string data_path;
  std::string out_dir;
  uint64_t seed = 1;
  int n_trials = 5;
  std::vector<std::string> strategies = {"zerogen", "refined"};
  int sample_size_multiplier = 1;
  bool resume = true;
  bool plots = false;

  BackendSpec generator{"mock", nlohmann::json::object()};
  BackendSpec seq2seq{"echo", nlohmann::json::object()};
  BackendSpec classifier{"centroid", nlohmann::json::object()};

  RefinerConfig refiner;
  ClassifierTrainSpec classifier_train;
  CleanupRules cleanup = CleanupRules::minimal();
  PromptTemplate prompt = PromptTemplate::default_generation();
  GenerationConfig generation;
  CustomPlanConfig custom;

  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig from_file(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;

  void validate() const;

 private:
  static PipelineConfig from_json_checked(const nlohmann::json& j);
};

struct ManifestStage {
  bool completed = false;
  std::string completed_utc;
  std::string notes;  // e.g. per-intent failure summary for generate
};

// Everything needed to re-run any stage deterministically: the config
// snapshot, the plans, backend identities, and every artifact file on disk.
struct RunManifest {
  std::string version = kVersion;
  nlohmann::ordered_json config_snapshot;
  std::vector<ExperimentPlan> plans;
  std::map<std::string, ManifestStage> stages;
  std::map<std::string, std::string> backend_ids;
  // artifact relative path -> stage that wrote it
  std::map<std::string, std::string> artifacts;

  void add_artifact(const std::string& relative_path, const std::string& stage);
  bool stage_completed(const std::string& stage) const;

  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

// Artifact-store record for one synthetic utterance.
nlohmann::ordered_json generation_record_to_artifact(const GenerationRecord& record,
                                                     int trial_id, uint64_t seed);
void write_generation_artifact(const std::filesystem::path& path,
                               const std::vector<GenerationRecord>& records,
                               int trial_id, uint64_t seed);
std::vector<GenerationRecord> read_generation_artifact(const std::filesystem::path& path);

// Orchestrates the stages over one output directory. Stage state lives in
// manifest.json, so each verb can run in a fresh process.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  // One of: split, generate, refine, select, evaluate, report.
  void run_stage(const std::string& stage);

  const std::string& report_text() const { return report_text_; }
  const PipelineConfig& config() const { return config_; }
  std::filesystem::path out_dir() const { return out_dir_; }

  RunManifest load_manifest() const;

 private:
  void stage_split();
  void stage_generate();
  void stage_refine();
  void stage_select();
  void stage_evaluate();
  void stage_report();

  void save_manifest(const RunManifest& manifest) const;
  RunManifest require_stages(std::initializer_list<const char*> needed) const;
  Corpus load_working_corpus() const;

  PipelineConfig config_;
  std::filesystem::path out_dir_;
  std::string report_text_;
};

}  // namespace intentsynth

#endif  // INTENTSYNTH_RUNNER_HPP
