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

#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <set>
#include <sstream>

#include "ioutil.hpp"
#include "rand.hpp"
#include "selection.hpp"
#include "text.hpp"

namespace intentsynth {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::set<std::string> kKnownStrategies = {"zerogen", "supergen", "refined"};

std::string utc_now_iso8601() {
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, "malformed JSON in " + what + ": " + e.what());
  }
}

size_t count_jsonl_lines(const fs::path& path) {
  if (!fs::exists(path)) return 0;
  const std::string raw = read_text_file(path);
  size_t lines = 0;
  for (const std::string& line : split_lines(raw)) {
    if (!trim(line).empty()) ++lines;
  }
  return lines;
}

std::string intent_file_name(const IntentKey& key) {
  return key.domain + "__" + key.intent + ".jsonl";
}

std::string trial_dir_name(int trial_id) {
  return "trial_" + std::to_string(trial_id);
}

CleanupRules cleanup_from_json(const json& j) {
  CleanupRules r;
  r.strip_quotes = j.value("strip_quotes", r.strip_quotes);
  r.strip_list_markers = j.value("strip_list_markers", r.strip_list_markers);
  r.strip_user_prefix = j.value("strip_user_prefix", r.strip_user_prefix);
  r.drop_trailing_parenthetical =
      j.value("drop_trailing_parenthetical", r.drop_trailing_parenthetical);
  r.collapse_whitespace = j.value("collapse_whitespace", r.collapse_whitespace);
  return r;
}

ordered_json cleanup_to_json(const CleanupRules& r) {
  ordered_json j;
  j["strip_quotes"] = r.strip_quotes;
  j["strip_list_markers"] = r.strip_list_markers;
  j["strip_user_prefix"] = r.strip_user_prefix;
  j["drop_trailing_parenthetical"] = r.drop_trailing_parenthetical;
  j["collapse_whitespace"] = r.collapse_whitespace;
  return j;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j) {
  try {
    return from_json_checked(j);
  } catch (const json::exception& e) {
    fail(ErrorKind::Argument, std::string("invalid config: ") + e.what());
  }
}

PipelineConfig PipelineConfig::from_json_checked(const json& j) {
  PipelineConfig c;
  if (!j.is_object()) fail(ErrorKind::Argument, "config must be a JSON object");
  if (!j.contains("dataset")) fail(ErrorKind::Argument, "config field 'dataset' is required");
  try {
    c.dataset = dataset_name_from_string(j.at("dataset").get<std::string>());
  } catch (const Error&) {
    fail(ErrorKind::Argument, "config field 'dataset' must be clinc150, sgd, or custom");
  }
  if (!j.contains("data_path")) {
    fail(ErrorKind::Argument, "config field 'data_path' is required");
  }
  c.data_path = j.at("data_path").get<std::string>();
  c.out_dir = j.value("out_dir", "");
  c.seed = j.value("seed", c.seed);
  c.n_trials = j.value("n_trials", c.n_trials);
  if (j.contains("strategies")) {
    c.strategies = j.at("strategies").get<std::vector<std::string>>();
  }
  c.sample_size_multiplier = j.value("sample_size_multiplier", c.sample_size_multiplier);
  c.resume = j.value("resume", c.resume);
  c.plots = j.value("plots", c.plots);
  if (j.contains("generator")) c.generator = BackendSpec::from_json(j.at("generator"));
  if (j.contains("seq2seq")) c.seq2seq = BackendSpec::from_json(j.at("seq2seq"));
  if (j.contains("classifier")) c.classifier = BackendSpec::from_json(j.at("classifier"));
  if (j.contains("refiner")) c.refiner = RefinerConfig::from_json(j.at("refiner"));
  if (j.contains("classifier_train")) {
    c.classifier_train = ClassifierTrainSpec::from_json(j.at("classifier_train"));
  }
  if (j.contains("cleanup")) c.cleanup = cleanup_from_json(j.at("cleanup"));
  if (j.contains("prompt_template")) {
    const json& p = j.at("prompt_template");
    c.prompt.template_id = p.value("id", "custom");
    c.prompt.body = p.at("body").get<std::string>();
  }
  if (j.contains("generation")) {
    const json& g = j.at("generation");
    c.generation.max_retries = g.value("max_retries", c.generation.max_retries);
    c.generation.max_new_tokens = g.value("max_new_tokens", c.generation.max_new_tokens);
    c.generation.temperature = g.value("temperature", c.generation.temperature);
    c.generation.oversample_factor =
        g.value("oversample_factor", c.generation.oversample_factor);
  }
  if (j.contains("custom")) {
    const json& k = j.at("custom");
    c.custom.n_unseen = k.value("n_unseen", c.custom.n_unseen);
    c.custom.n_val = k.value("n_val", c.custom.n_val);
    c.custom.per_intent_generation_count =
        k.value("per_intent_generation_count", c.custom.per_intent_generation_count);
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::from_file(const fs::path& path) {
  if (!fs::exists(path)) fail(ErrorKind::Argument, "config file not found: " + path.string());
  return from_json(parse_json_text(read_text_file(path), path.string()));
}

ordered_json PipelineConfig::to_json() const {
  ordered_json j;
  j["dataset"] = to_string(dataset);
  j["data_path"] = data_path;
  j["out_dir"] = out_dir;
  j["seed"] = seed;
  j["n_trials"] = n_trials;
  j["strategies"] = strategies;
  j["sample_size_multiplier"] = sample_size_multiplier;
  j["resume"] = resume;
  j["plots"] = plots;
  j["generator"] = generator.to_json();
  j["seq2seq"] = seq2seq.to_json();
  j["classifier"] = classifier.to_json();
  j["refiner"] = refiner.to_json();
  j["classifier_train"] = classifier_train.to_json();
  j["cleanup"] = cleanup_to_json(cleanup);
  j["prompt_template"] = ordered_json{{"id", prompt.template_id}, {"body", prompt.body}};
  j["generation"] = ordered_json{{"max_retries", generation.max_retries},
                                 {"max_new_tokens", generation.max_new_tokens},
                                 {"temperature", generation.temperature},
                                 {"oversample_factor", generation.oversample_factor}};
  j["custom"] = ordered_json{
      {"n_unseen", custom.n_unseen},
      {"n_val", custom.n_val},
      {"per_intent_generation_count", custom.per_intent_generation_count}};
  return j;
}

void PipelineConfig::validate() const {
  if (data_path.empty()) fail(ErrorKind::Argument, "config field 'data_path' is empty");
  if (out_dir.empty()) fail(ErrorKind::Argument, "config field 'out_dir' is empty");
  if (n_trials < 1) fail(ErrorKind::Argument, "config field 'n_trials' must be >= 1");
  if (sample_size_multiplier != 1 && sample_size_multiplier != 2) {
    fail(ErrorKind::Argument, "config field 'sample_size_multiplier' must be 1 or 2");
  }
  if (strategies.empty()) {
    fail(ErrorKind::Argument, "config field 'strategies' must not be empty");
  }
  std::set<std::string> seen;
  for (const std::string& s : strategies) {
    if (!kKnownStrategies.count(s)) {
      fail(ErrorKind::Argument, "config field 'strategies' has unknown entry '" + s + "'");
    }
    if (!seen.insert(s).second) {
      fail(ErrorKind::Argument, "config field 'strategies' repeats '" + s + "'");
    }
  }
  if (refiner.m < 1 || refiner.n < 1) {
    fail(ErrorKind::Argument, "config field 'refiner' needs m >= 1 and n >= 1");
  }
  if (generation.oversample_factor < 1) {
    fail(ErrorKind::Argument, "config field 'generation.oversample_factor' must be >= 1");
  }
  if (custom.n_unseen < 1 || custom.n_val < 1) {
    fail(ErrorKind::Argument, "config field 'custom' partition sizes must be >= 1");
  }
}

void RunManifest::add_artifact(const std::string& relative_path, const std::string& stage) {
  artifacts[relative_path] = stage;
}

bool RunManifest::stage_completed(const std::string& stage) const {
  auto it = stages.find(stage);
  return it != stages.end() && it->second.completed;
}

ordered_json RunManifest::to_json() const {
  ordered_json j;
  j["version"] = version;
  j["config"] = config_snapshot;
  j["plans"] = ordered_json::array();
  for (const ExperimentPlan& p : plans) j["plans"].push_back(p.to_json());
  j["stages"] = ordered_json::object();
  for (const auto& [name, stage] : stages) {
    ordered_json s{{"completed", stage.completed},
                   {"completed_utc", stage.completed_utc}};
    if (!stage.notes.empty()) s["notes"] = stage.notes;
    j["stages"][name] = s;
  }
  j["backend_ids"] = backend_ids;
  j["artifacts"] = artifacts;
  return j;
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.version = j.value("version", "");
  m.config_snapshot = j.value("config", json::object());
  if (j.contains("plans")) {
    for (const json& p : j.at("plans")) m.plans.push_back(ExperimentPlan::from_json(p));
  }
  if (j.contains("stages")) {
    for (auto it = j.at("stages").begin(); it != j.at("stages").end(); ++it) {
      ManifestStage s;
      s.completed = it.value().value("completed", false);
      s.completed_utc = it.value().value("completed_utc", "");
      s.notes = it.value().value("notes", "");
      m.stages[it.key()] = s;
    }
  }
  if (j.contains("backend_ids")) {
    m.backend_ids = j.at("backend_ids").get<std::map<std::string, std::string>>();
  }
  if (j.contains("artifacts")) {
    m.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
  }
  return m;
}

ordered_json generation_record_to_artifact(const GenerationRecord& record,
                                           int trial_id, uint64_t seed) {
  ordered_json j;
  j["text"] = record.text;
  j["intent"] = record.key.intent;
  j["domain"] = record.key.domain;
  j["origin"] = record.strategy == "refined" ? "refined" : "generated";
  j["strategy"] = record.strategy;
  j["trial_id"] = trial_id;
  if (!record.token_probabilities.empty()) {
    j["token_probabilities"] = record.token_probabilities;
  }
  j["provenance"] = ordered_json{{"backend_id", record.backend_id},
                                 {"prompt_id", record.prompt_id},
                                 {"seed", seed}};
  return j;
}

void write_generation_artifact(const fs::path& path,
                               const std::vector<GenerationRecord>& records,
                               int trial_id, uint64_t seed) {
  std::string out;
  for (const GenerationRecord& r : records) {
    out += generation_record_to_artifact(r, trial_id, seed).dump();
    out += '\n';
  }
  write_text_atomic(path, out);
}

std::vector<GenerationRecord> read_generation_artifact(const fs::path& path) {
  if (!fs::exists(path)) {
    fail(ErrorKind::Dependency, "missing artifact: " + path.string());
  }
  std::vector<GenerationRecord> records;
  const std::string raw = read_text_file(path);
  for (const std::string& line : split_lines(raw)) {
    if (trim(line).empty()) continue;
    json j = parse_json_text(line, path.string());
    GenerationRecord r;
    r.text = j.at("text").get<std::string>();
    r.key.intent = j.at("intent").get<std::string>();
    r.key.domain = j.at("domain").get<std::string>();
    r.strategy = j.value("strategy", "");
    if (j.contains("token_probabilities")) {
      r.token_probabilities = j["token_probabilities"].get<std::vector<double>>();
    }
    if (j.contains("provenance")) {
      r.backend_id = j["provenance"].value("backend_id", "");
      r.prompt_id = j["provenance"].value("prompt_id", "");
    }
    records.push_back(std::move(r));
  }
  return records;
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
  config_.validate();
  out_dir_ = fs::path(config_.out_dir);
}

RunManifest Pipeline::load_manifest() const {
  const fs::path path = out_dir_ / "manifest.json";
  if (!fs::exists(path)) {
    fail(ErrorKind::Dependency, "no manifest at " + path.string() +
                                    "; run the split stage first");
  }
  return RunManifest::from_json(parse_json_text(read_text_file(path), path.string()));
}

void Pipeline::save_manifest(const RunManifest& manifest) const {
  write_text_atomic(out_dir_ / "manifest.json", manifest.to_json().dump(2) + "\n");
}

RunManifest Pipeline::require_stages(std::initializer_list<const char*> needed) const {
  RunManifest manifest = load_manifest();
  for (const char* stage : needed) {
    if (!manifest.stage_completed(stage)) {
      fail(ErrorKind::Dependency,
           std::string("stage '") + stage + "' has not completed yet");
    }
  }
  return manifest;
}

Corpus Pipeline::load_working_corpus() const {
  return load_corpus_jsonl(out_dir_ / "corpus.jsonl");
}

void Pipeline::run_stage(const std::string& stage) {
  if (stage == "split") {
    stage_split();
  } else if (stage == "generate") {
    stage_generate();
  } else if (stage == "refine") {
    stage_refine();
  } else if (stage == "select") {
    stage_select();
  } else if (stage == "evaluate") {
    stage_evaluate();
  } else if (stage == "report") {
    stage_report();
  } else {
    fail(ErrorKind::Argument, "unknown stage '" + stage +
                                  "' (expected split, generate, refine, select, "
                                  "evaluate, or report)");
  }
}

// ---------------------------------------------------------------------------
// split

void Pipeline::stage_split() {
  Corpus corpus;
  switch (config_.dataset) {
    case DatasetName::Clinc150:
      corpus = load_clinc150(config_.data_path);
      break;
    case DatasetName::Sgd:
      corpus = load_sgd_merged(config_.data_path);
      break;
    case DatasetName::Custom:
      corpus = load_corpus_jsonl(config_.data_path);
      break;
  }

  std::vector<ExperimentPlan> plans;
  switch (config_.dataset) {
    case DatasetName::Clinc150:
      plans = plan_clinc150_trials(config_.seed, config_.n_trials);
      break;
    case DatasetName::Sgd:
      plans = plan_sgd_trials(config_.seed, config_.n_trials);
      break;
    case DatasetName::Custom: {
      const std::set<std::string> domain_set = corpus.domain_names();
      std::vector<std::string> domains(domain_set.begin(), domain_set.end());
      plans = plan_trials(domains, config_.custom.n_unseen, config_.custom.n_val,
                          config_.custom.per_intent_generation_count, config_.seed,
                          config_.n_trials);
      break;
    }
  }
  // Every plan must materialize cleanly before anything is persisted.
  for (const ExperimentPlan& plan : plans) materialize_trial(plan, corpus);

  // An identical re-run keeps the previous stage/artifact state so resumable
  // stages stay resumable; a changed plan set starts the run over and clears
  // stale managed artifacts.
  RunManifest manifest;
  const fs::path manifest_path = out_dir_ / "manifest.json";
  if (fs::exists(manifest_path)) {
    RunManifest previous = RunManifest::from_json(
        parse_json_text(read_text_file(manifest_path), manifest_path.string()));
    if (previous.plans == plans) {
      manifest = std::move(previous);
    } else {
      for (const char* dir :
           {"gen", "gen_seen", "gen_over", "strategies", "refiner", "reports"}) {
        std::error_code ec;
        fs::remove_all(out_dir_ / dir, ec);
      }
    }
  }

  fs::create_directories(out_dir_);
  save_corpus_jsonl(corpus, out_dir_ / "corpus.jsonl");
  ordered_json plans_json = ordered_json::array();
  for (const ExperimentPlan& p : plans) plans_json.push_back(p.to_json());
  write_text_atomic(out_dir_ / "plans.json", plans_json.dump(2) + "\n");

  manifest.config_snapshot = config_.to_json();
  manifest.plans = plans;
  manifest.add_artifact("corpus.jsonl", "split");
  manifest.add_artifact("plans.json", "split");
  manifest.stages["split"] = {true, utc_now_iso8601()};
  save_manifest(manifest);
}

// ---------------------------------------------------------------------------
// generate

void Pipeline::stage_generate() {
  RunManifest manifest = require_stages({"split"});
  const Corpus corpus = load_working_corpus();
  std::unique_ptr<GeneratorBackend> backend = make_generator_backend(config_.generator);
  manifest.backend_ids["generator"] = backend->id();

  GenerationOptions options;
  options.max_retries = config_.generation.max_retries;
  options.max_new_tokens = config_.generation.max_new_tokens;
  options.temperature = config_.generation.temperature;
  options.cleanup = config_.cleanup;

  const bool want_refined =
      std::count(config_.strategies.begin(), config_.strategies.end(), "refined") > 0;
  const bool want_supergen =
      std::count(config_.strategies.begin(), config_.strategies.end(), "supergen") > 0;

  std::vector<std::string> failures;

  auto produce = [&](const fs::path& rel, const IntentKey& key, int quota,
                     uint64_t seed, bool oversampled, int trial_id) {
    const fs::path full = out_dir_ / rel;
    if (config_.resume && count_jsonl_lines(full) == static_cast<size_t>(quota)) {
      manifest.add_artifact(rel.generic_string(), "generate");
      return;
    }
    try {
      std::vector<GenerationRecord> records;
      if (oversampled) {
        records = oversample_for_selection(*backend, config_.prompt, key,
                                           quota / config_.generation.oversample_factor,
                                           config_.generation.oversample_factor, seed,
                                           options);
      } else {
        records = generate_for_intent(*backend, config_.prompt, key, quota, seed, options);
      }
      write_generation_artifact(full, records, trial_id, seed);
      manifest.add_artifact(rel.generic_string(), "generate");
    } catch (const GenerationError& e) {
      // Keep partial output so a resumed run can finish the quota later.
      if (!e.partial_results().empty()) {
        write_generation_artifact(full, e.partial_results(), trial_id, seed);
        manifest.add_artifact(rel.generic_string(), "generate");
      }
      failures.push_back(key.domain + "/" + key.intent + ": " + e.what());
    }
  };

  for (const ExperimentPlan& plan : manifest.plans) {
    const TrialBundle bundle = materialize_trial(plan, corpus);
    const int quota = plan.per_intent_generation_count * config_.sample_size_multiplier;
    const std::string trial_dir = trial_dir_name(plan.trial_id);

    for (const IntentKey& key : bundle.unseen_intents) {
      produce(fs::path("gen") / trial_dir / intent_file_name(key), key, quota,
              seed_stream(config_.seed, "generate", key.intent, key.domain) ^
                  static_cast<uint64_t>(plan.trial_id),
              false, plan.trial_id);
    }
    if (want_supergen) {
      for (const IntentKey& key : bundle.unseen_intents) {
        produce(fs::path("gen_over") / trial_dir / intent_file_name(key), key,
                quota * config_.generation.oversample_factor,
                seed_stream(config_.seed, "generate_over", key.intent, key.domain) ^
                    static_cast<uint64_t>(plan.trial_id),
                true, plan.trial_id);
      }
    }
    if (want_refined) {
      // Seen-domain generation mirrors the human counts so refiner training
      // pairs line up one-to-one.
      for (const auto& [key, positions] : bundle.seen_train.by_intent()) {
        produce(fs::path("gen_seen") / trial_dir / intent_file_name(key), key,
                static_cast<int>(positions.size()),
                seed_stream(config_.seed, "generate_seen", key.intent, key.domain) ^
                    static_cast<uint64_t>(plan.trial_id),
                false, plan.trial_id);
      }
    }
  }

  ManifestStage stage_state{failures.empty(), utc_now_iso8601(), ""};
  std::string msg;
  if (!failures.empty()) {
    msg = std::to_string(failures.size()) + " intent(s) incomplete:";
    for (const std::string& f : failures) msg += "\n  " + f;
    stage_state.notes = msg;
  }
  manifest.stages["generate"] = stage_state;
  save_manifest(manifest);
  if (!failures.empty()) fail(ErrorKind::Backend, msg);
}

// ---------------------------------------------------------------------------
// refine

namespace {

PerIntentTexts texts_from_artifacts(const fs::path& dir,
                                    const std::vector<IntentKey>& keys) {
  PerIntentTexts out;
  for (const IntentKey& key : keys) {
    const fs::path file = dir / intent_file_name(key);
    std::vector<std::string> texts;
    for (const GenerationRecord& r : read_generation_artifact(file)) {
      texts.push_back(r.text);
    }
    out[key] = std::move(texts);
  }
  return out;
}

PerIntentTexts texts_from_corpus(const Corpus& corpus,
                                 const std::vector<IntentKey>& keys) {
  PerIntentTexts out;
  for (const IntentKey& key : keys) out[key] = corpus.texts_for(key);
  return out;
}

}  // namespace

void Pipeline::stage_refine() {
  const bool refined_configured =
      std::count(config_.strategies.begin(), config_.strategies.end(), "refined") > 0;
  if (!refined_configured) {
    fail(ErrorKind::Argument, "refine stage needs 'refined' among the strategies");
  }
  RunManifest manifest = require_stages({"split", "generate"});
  const Corpus corpus = load_working_corpus();

  std::unique_ptr<Seq2SeqBackend> seq2seq = make_seq2seq_backend(config_.seq2seq);
  std::unique_ptr<ClassifierBackend> classifier =
      make_classifier_backend(config_.classifier);
  manifest.backend_ids["seq2seq"] = seq2seq->id();
  manifest.backend_ids["classifier"] = classifier->id();

  for (const ExperimentPlan& plan : manifest.plans) {
    const TrialBundle bundle = materialize_trial(plan, corpus);
    const std::string trial_dir = trial_dir_name(plan.trial_id);
    const fs::path gen_seen_dir = out_dir_ / "gen_seen" / trial_dir;

    // Refiner training pairs come from the seen-train domains only.
    std::vector<IntentKey> train_keys;
    std::vector<IntentKey> val_keys;
    for (const IntentKey& key : bundle.seen_train.intents()) {
      if (plan.seen_train_domains.count(key.domain)) train_keys.push_back(key);
    }
    for (const IntentKey& key : bundle.seen_val.intents()) val_keys.push_back(key);

    RefinerConfig cfg = config_.refiner;
    cfg.seed = seed_stream(config_.seed, "pairs", static_cast<uint64_t>(plan.trial_id));
    std::vector<RefinementExample> pairs =
        sample_training_pairs(texts_from_artifacts(gen_seen_dir, train_keys),
                              texts_from_corpus(bundle.seen_train, train_keys), cfg);

    ClassifierTrainSpec monitor_spec = config_.classifier_train;
    monitor_spec.seed =
        seed_stream(config_.seed, "monitor", static_cast<uint64_t>(plan.trial_id));
    ClassifierHandle monitor_classifier =
        train_intent_classifier(bundle.seen_train, monitor_spec, *classifier);

    RefinerConfig val_cfg = cfg;
    val_cfg.seed =
        seed_stream(config_.seed, "val_pairs", static_cast<uint64_t>(plan.trial_id));
    ValidationMonitor monitor;
    monitor.classifier = monitor_classifier;
    monitor.val_examples =
        sample_training_pairs(texts_from_artifacts(gen_seen_dir, val_keys),
                              texts_from_corpus(bundle.seen_val, val_keys), val_cfg);
    monitor.n_outputs = cfg.n;
    monitor.cleanup = config_.cleanup;

    Seq2SeqHandle model = train_refiner(pairs, cfg, *seq2seq, monitor);

    const uint64_t refine_seed =
        seed_stream(config_.seed, "refine", static_cast<uint64_t>(plan.trial_id));
    const size_t cap = static_cast<size_t>(plan.per_intent_generation_count) *
                       static_cast<size_t>(config_.sample_size_multiplier);
    RefineResult refined = refine_corpus(
        *model, texts_from_artifacts(out_dir_ / "gen" / trial_dir, bundle.unseen_intents),
        cfg, refine_seed, cap, config_.cleanup);

    for (const IntentKey& key : bundle.unseen_intents) {
      std::vector<GenerationRecord> records;
      for (const std::string& text : refined.corpus.texts_for(key)) {
        GenerationRecord r;
        r.text = text;
        r.key = key;
        r.prompt_id = "refiner";
        r.backend_id = seq2seq->id();
        r.strategy = "refined";
        records.push_back(std::move(r));
      }
      const fs::path rel =
          fs::path("strategies") / "refined" / trial_dir / intent_file_name(key);
      write_generation_artifact(out_dir_ / rel, records, plan.trial_id, refine_seed);
      manifest.add_artifact(rel.generic_string(), "refine");
    }

    ordered_json state;
    state["backend"] = seq2seq->id();
    state["config"] = cfg.to_json();
    state["passthrough_count"] = refined.passthrough_count;
    state["model"] = model->save();
    const fs::path rel = fs::path("refiner") / (trial_dir + ".json");
    write_text_atomic(out_dir_ / rel, state.dump(2) + "\n");
    manifest.add_artifact(rel.generic_string(), "refine");
  }

  manifest.stages["refine"] = {true, utc_now_iso8601()};
  save_manifest(manifest);
}

// ---------------------------------------------------------------------------
// select

void Pipeline::stage_select() {
  RunManifest manifest = require_stages({"split", "generate"});
  const Corpus corpus = load_working_corpus();
  const bool want_zerogen =
      std::count(config_.strategies.begin(), config_.strategies.end(), "zerogen") > 0;
  const bool want_supergen =
      std::count(config_.strategies.begin(), config_.strategies.end(), "supergen") > 0;

  for (const ExperimentPlan& plan : manifest.plans) {
    const TrialBundle bundle = materialize_trial(plan, corpus);
    const std::string trial_dir = trial_dir_name(plan.trial_id);
    const int quota = plan.per_intent_generation_count * config_.sample_size_multiplier;

    for (const IntentKey& key : bundle.unseen_intents) {
      if (want_zerogen) {
        std::vector<GenerationRecord> records = zerogen_select(
            read_generation_artifact(out_dir_ / "gen" / trial_dir / intent_file_name(key)));
        const fs::path rel =
            fs::path("strategies") / "zerogen" / trial_dir / intent_file_name(key);
        write_generation_artifact(out_dir_ / rel, records, plan.trial_id,
                                  seed_stream(config_.seed, "zerogen",
                                              static_cast<uint64_t>(plan.trial_id)));
        manifest.add_artifact(rel.generic_string(), "select");
      }
      if (want_supergen) {
        std::vector<GenerationRecord> pool = read_generation_artifact(
            out_dir_ / "gen_over" / trial_dir / intent_file_name(key));
        std::vector<GenerationRecord> selected =
            supergen_select(score_records(pool), static_cast<size_t>(quota));
        const fs::path rel =
            fs::path("strategies") / "supergen" / trial_dir / intent_file_name(key);
        write_generation_artifact(out_dir_ / rel, selected, plan.trial_id,
                                  seed_stream(config_.seed, "supergen",
                                              static_cast<uint64_t>(plan.trial_id)));
        manifest.add_artifact(rel.generic_string(), "select");
      }
    }
  }

  manifest.stages["select"] = {true, utc_now_iso8601()};
  save_manifest(manifest);
}

// ---------------------------------------------------------------------------
// evaluate

namespace {

Corpus strategy_corpus(const fs::path& out_dir, const std::string& strategy,
                       int trial_id, const std::vector<IntentKey>& keys) {
  std::vector<LabeledExample> examples;
  for (const IntentKey& key : keys) {
    const fs::path file = out_dir / "strategies" / strategy /
                          trial_dir_name(trial_id) / intent_file_name(key);
    for (const GenerationRecord& r : read_generation_artifact(file)) {
      examples.push_back(LabeledExample{
          r.text, r.key,
          strategy == "refined" ? Origin::Refined : Origin::Generated,
          SplitTag::Train});
    }
  }
  return corpus_from_examples(DatasetName::Custom, std::move(examples));
}

IntentDocuments documents_from_corpus(const Corpus& corpus,
                                      const std::vector<IntentKey>& keys) {
  IntentDocuments docs;
  for (const IntentKey& key : keys) docs[key.intent] = corpus.texts_for(key);
  return docs;
}

}  // namespace

void Pipeline::stage_evaluate() {
  if (config_.strategies.empty()) {
    fail(ErrorKind::Argument, "no strategies configured");
  }
  RunManifest manifest = require_stages({"split", "generate"});
  for (const std::string& strategy : config_.strategies) {
    const char* producer = strategy == "refined" ? "refine" : "select";
    if (!manifest.stage_completed(producer)) {
      fail(ErrorKind::Dependency, "strategy '" + strategy + "' needs stage '" +
                                      producer + "' to run first");
    }
  }
  const Corpus corpus = load_working_corpus();
  std::unique_ptr<ClassifierBackend> classifier =
      make_classifier_backend(config_.classifier);
  manifest.backend_ids["classifier"] = classifier->id();

  std::vector<TrialReport> all_reports;
  for (const ExperimentPlan& plan : manifest.plans) {
    const TrialBundle bundle = materialize_trial(plan, corpus);

    std::map<std::string, Corpus> data_by_strategy;
    std::map<std::string, IntentDocuments> docs;
    for (const std::string& strategy : config_.strategies) {
      Corpus data = strategy_corpus(out_dir_, strategy, plan.trial_id,
                                    bundle.unseen_intents);
      docs[strategy] = documents_from_corpus(data, bundle.unseen_intents);
      data_by_strategy[strategy] = std::move(data);
    }

    // Human reference for diversity: unseen-domain human utterances
    // (train split when the dataset has one, otherwise the test pool).
    Corpus human_reference;
    if (corpus.descriptor().name == DatasetName::Sgd) {
      human_reference = bundle.unseen_test;
    } else {
      human_reference = filter_by_domains(corpus, plan.unseen_domains, SplitTag::Train);
      if (human_reference.empty()) human_reference = bundle.unseen_test;
    }
    docs["real"] = documents_from_corpus(human_reference, bundle.unseen_intents);

    const uint64_t truncate_seed =
        seed_stream(config_.seed, "truncate", static_cast<uint64_t>(plan.trial_id));
    std::map<std::string, IntentDocuments> truncated =
        truncate_for_comparison(docs, truncate_seed);

    // The classifier seed is shared across strategies so equal training data
    // yields equal accuracy.
    ClassifierTrainSpec spec = config_.classifier_train;
    spec.seed = seed_stream(config_.seed, "eval_classifier",
                            static_cast<uint64_t>(plan.trial_id));

    ordered_json trial_json;
    trial_json["trial_id"] = plan.trial_id;
    trial_json["reports"] = ordered_json::array();
    for (const std::string& strategy : config_.strategies) {
      const Corpus& data = data_by_strategy[strategy];
      ClassifierHandle handle = train_intent_classifier(data, spec, *classifier);
      TrialReport report;
      report.trial_id = plan.trial_id;
      report.strategy_id = strategy;
      report.accuracy = evaluate_accuracy(*handle, bundle.unseen_test);
      report.distinct1 = distinct_n(truncated[strategy], 1);
      report.distinct2 = distinct_n(truncated[strategy], 2);
      report.n_train_utterances = static_cast<int>(data.size());
      trial_json["reports"].push_back(report.to_json());
      all_reports.push_back(report);
    }
    trial_json["real_distinct1"] = distinct_n(truncated["real"], 1);
    trial_json["real_distinct2"] = distinct_n(truncated["real"], 2);

    const fs::path rel = fs::path("reports") / (trial_dir_name(plan.trial_id) + ".json");
    write_text_atomic(out_dir_ / rel, trial_json.dump(2) + "\n");
    manifest.add_artifact(rel.generic_string(), "evaluate");
  }

  AggregateReport aggregate = aggregate_trials(all_reports);
  ordered_json agg_json = aggregate.to_json();
  {
    // Mean real-data diversity over trials, for the report footer.
    double d1 = 0.0, d2 = 0.0;
    for (const ExperimentPlan& plan : manifest.plans) {
      const fs::path file =
          out_dir_ / "reports" / (trial_dir_name(plan.trial_id) + ".json");
      json j = parse_json_text(read_text_file(file), file.string());
      d1 += j.value("real_distinct1", 0.0);
      d2 += j.value("real_distinct2", 0.0);
    }
    agg_json["real_distinct1_mean"] = d1 / static_cast<double>(manifest.plans.size());
    agg_json["real_distinct2_mean"] = d2 / static_cast<double>(manifest.plans.size());
  }
  write_text_atomic(out_dir_ / "reports" / "aggregate.json", agg_json.dump(2) + "\n");
  manifest.add_artifact("reports/aggregate.json", "evaluate");

  manifest.stages["evaluate"] = {true, utc_now_iso8601()};
  save_manifest(manifest);
}

// ---------------------------------------------------------------------------
// report

namespace {

std::string svg_bar_chart(const std::string& title,
                          const std::vector<std::pair<std::string, double>>& bars,
                          double max_value) {
  const int width = 80 * static_cast<int>(bars.size()) + 60;
  const int height = 220;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<text x=\"10\" y=\"18\" font-size=\"14\">" << title << "</text>\n";
  if (max_value <= 0.0) max_value = 1.0;
  int x = 50;
  for (const auto& [label, value] : bars) {
    const int bar_height = static_cast<int>(150.0 * value / max_value);
    const int y = 180 - bar_height;
    svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"48\" height=\""
        << bar_height << "\" fill=\"#4878a8\"/>\n";
    char value_text[32];
    std::snprintf(value_text, sizeof(value_text), "%.3f", value);
    svg << "<text x=\"" << x << "\" y=\"" << (y - 4) << "\" font-size=\"11\">"
        << value_text << "</text>\n";
    svg << "<text x=\"" << x << "\" y=\"196\" font-size=\"11\">" << label
        << "</text>\n";
    x += 80;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

void Pipeline::stage_report() {
  RunManifest manifest = require_stages({"split", "evaluate"});

  std::vector<TrialReport> reports;
  double real_d1 = 0.0, real_d2 = 0.0;
  for (const ExperimentPlan& plan : manifest.plans) {
    const fs::path file =
        out_dir_ / "reports" / (trial_dir_name(plan.trial_id) + ".json");
    if (!fs::exists(file)) {
      fail(ErrorKind::Dependency, "missing trial report: " + file.string());
    }
    json j = parse_json_text(read_text_file(file), file.string());
    for (const json& r : j.at("reports")) reports.push_back(TrialReport::from_json(r));
    real_d1 += j.value("real_distinct1", 0.0);
    real_d2 += j.value("real_distinct2", 0.0);
  }
  real_d1 /= static_cast<double>(manifest.plans.size());
  real_d2 /= static_cast<double>(manifest.plans.size());

  AggregateReport aggregate = aggregate_trials(reports);
  std::ostringstream text;
  text << "trials: " << manifest.plans.size() << ", dataset: "
       << to_string(config_.dataset) << "\n\n";
  text << format_report_table(aggregate);
  char footer[96];
  std::snprintf(footer, sizeof(footer),
                "real (human) data diversity: dist-1 %.3f, dist-2 %.3f\n", real_d1,
                real_d2);
  text << footer;
  report_text_ = text.str();

  write_text_atomic(out_dir_ / "reports" / "report.txt", report_text_);
  manifest.add_artifact("reports/report.txt", "report");

  if (config_.plots) {
    std::vector<std::pair<std::string, double>> acc_bars;
    std::vector<std::pair<std::string, double>> div_bars;
    double max_acc = 0.0;
    double max_div = 0.0;
    for (const StrategyAggregate& s : aggregate.strategies) {
      acc_bars.emplace_back(s.strategy_id, s.accuracy_mean);
      max_acc = std::max(max_acc, s.accuracy_mean);
      div_bars.emplace_back(s.strategy_id + "/d1", s.distinct1_mean);
      div_bars.emplace_back(s.strategy_id + "/d2", s.distinct2_mean);
      max_div = std::max({max_div, s.distinct1_mean, s.distinct2_mean});
    }
    div_bars.emplace_back("real/d1", real_d1);
    div_bars.emplace_back("real/d2", real_d2);
    max_div = std::max({max_div, real_d1, real_d2});
    write_text_atomic(out_dir_ / "reports" / "accuracy.svg",
                      svg_bar_chart("accuracy (unseen domains)", acc_bars, max_acc));
    write_text_atomic(out_dir_ / "reports" / "diversity.svg",
                      svg_bar_chart("distinct-n", div_bars, max_div));
    manifest.add_artifact("reports/accuracy.svg", "report");
    manifest.add_artifact("reports/diversity.svg", "report");
  }

  manifest.stages["report"] = {true, utc_now_iso8601()};
  save_manifest(manifest);
}

}  // namespace intentsynth
