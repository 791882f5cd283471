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

#include "backends.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <set>

#include <httplib.h>

#include "ioutil.hpp"
#include "text.hpp"

namespace intentsynth {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json BackendSpec::to_json() const {
  ordered_json j;
  j["kind"] = kind;
  j["params"] = params;
  return j;
}

BackendSpec BackendSpec::from_json(const json& j) {
  BackendSpec s;
  if (j.is_string()) {
    s.kind = j.get<std::string>();
    return s;
  }
  s.kind = j.at("kind").get<std::string>();
  s.params = j.value("params", json::object());
  // Flat form: every key besides "kind" is a parameter.
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "kind" && it.key() != "params") s.params[it.key()] = it.value();
  }
  return s;
}

// ---------------------------------------------------------------------------
// Scripted mock generator

namespace {

struct ScriptEntry {
  IntentKey key;
  std::vector<std::string> texts;
  std::vector<std::vector<double>> token_probabilities;
};

class MockGeneratorBackend : public GeneratorBackend {
 public:
  explicit MockGeneratorBackend(const std::filesystem::path& script) {
    if (!std::filesystem::exists(script)) {
      fail(ErrorKind::Io, "mock script not found: " + script.string());
    }
    const std::string raw = read_text_file(script);
    for (const std::string& line : split_lines(raw)) {
      if (trim(line).empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        fail(ErrorKind::Parse, "bad mock script line: " + std::string(e.what()));
      }
      ScriptEntry entry;
      entry.key.intent = canonical_name(j.at("intent").get<std::string>());
      entry.key.domain = canonical_name(j.value("domain", ""));
      entry.texts = j.at("texts").get<std::vector<std::string>>();
      if (entry.texts.empty()) {
        fail(ErrorKind::Schema, "mock script entry for '" + entry.key.intent +
                                    "' has no texts");
      }
      if (j.contains("token_probabilities")) {
        entry.token_probabilities =
            j["token_probabilities"].get<std::vector<std::vector<double>>>();
        if (entry.token_probabilities.size() != entry.texts.size()) {
          fail(ErrorKind::Schema,
               "mock script probabilities misaligned for '" + entry.key.intent + "'");
        }
      }
      entries_.push_back(std::move(entry));
    }
    if (entries_.empty()) fail(ErrorKind::Schema, "mock script is empty");
    has_probabilities_ = std::all_of(
        entries_.begin(), entries_.end(),
        [](const ScriptEntry& e) { return !e.token_probabilities.empty(); });
  }

  std::string id() const override { return "mock"; }
  bool returns_token_probabilities() const override { return has_probabilities_; }
  bool is_deterministic() const override { return true; }
  bool supports_concurrent_calls() const override { return true; }

  GenerationResponse generate(const GenerationRequest& request) override {
    const ScriptEntry& entry = match(request.prompt);
    GenerationResponse response;
    const size_t n = entry.texts.size();
    const size_t start = static_cast<size_t>(request.seed % n);
    for (size_t i = 0; i < n; ++i) {
      const size_t pick = (start + i) % n;
      response.texts.push_back(entry.texts[pick]);
      if (request.want_token_probabilities && !entry.token_probabilities.empty()) {
        response.token_probabilities.push_back(entry.token_probabilities[pick]);
      }
    }
    return response;
  }

 private:
  const ScriptEntry& match(const std::string& prompt) const {
    // The default template quotes the intent as `name'; fall back to the
    // longest intent name appearing anywhere in the prompt.
    for (const ScriptEntry& entry : entries_) {
      if (prompt.find("`" + entry.key.intent + "'") != std::string::npos) {
        return entry;
      }
    }
    const ScriptEntry* best = nullptr;
    for (const ScriptEntry& entry : entries_) {
      if (prompt.find(entry.key.intent) == std::string::npos) continue;
      if (best == nullptr || entry.key.intent.size() > best->key.intent.size()) {
        best = &entry;
      }
    }
    if (best == nullptr) {
      fail(ErrorKind::Backend, "mock script has no entry matching the prompt");
    }
    return *best;
  }

  std::vector<ScriptEntry> entries_;
  bool has_probabilities_ = false;
};

}  // namespace

std::unique_ptr<GeneratorBackend> make_mock_generator(
    const std::filesystem::path& script) {
  return std::make_unique<MockGeneratorBackend>(script);
}

// ---------------------------------------------------------------------------
// Remote generator

namespace {

class RemoteGeneratorBackend : public GeneratorBackend {
 public:
  explicit RemoteGeneratorBackend(RemoteBackendOptions options)
      : options_(std::move(options)) {
    if (const char* env = std::getenv("INTENTSYNTH_REMOTE_ENDPOINT")) {
      options_.endpoint = env;
    }
    if (const char* env = std::getenv("INTENTSYNTH_REMOTE_TOKEN")) {
      options_.token = env;
    }
    if (options_.endpoint.empty()) {
      fail(ErrorKind::Argument, "remote backend needs an endpoint");
    }
    split_endpoint();
  }

  std::string id() const override { return "remote:" + options_.endpoint; }
  bool returns_token_probabilities() const override {
    return options_.token_probabilities;
  }
  bool is_deterministic() const override { return options_.deterministic; }

  GenerationResponse generate(const GenerationRequest& request) override {
    ordered_json body;
    body["prompt"] = request.prompt;
    body["max_new_tokens"] = request.max_new_tokens;
    body["temperature"] = request.temperature;
    body["seed"] = request.seed;
    body["want_token_probabilities"] = request.want_token_probabilities;

    httplib::Client client(base_.c_str());
    client.set_connection_timeout(options_.timeout_seconds, 0);
    client.set_read_timeout(options_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!options_.token.empty()) {
      headers.emplace("Authorization", "Bearer " + options_.token);
    }
    auto res = client.Post(path_.c_str(), headers, body.dump(), "application/json");
    if (!res) {
      fail(ErrorKind::Backend, "remote endpoint unreachable: " + options_.endpoint);
    }
    if (res->status != 200) {
      fail(ErrorKind::Backend, "remote endpoint returned HTTP " +
                                   std::to_string(res->status));
    }
    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::Backend, "remote endpoint sent malformed JSON: " +
                                   std::string(e.what()));
    }
    GenerationResponse response;
    response.texts = reply.at("texts").get<std::vector<std::string>>();
    if (reply.contains("token_probabilities") &&
        !reply["token_probabilities"].is_null()) {
      response.token_probabilities =
          reply["token_probabilities"].get<std::vector<std::vector<double>>>();
    }
    return response;
  }

 private:
  void split_endpoint() {
    const std::string& url = options_.endpoint;
    size_t scheme = url.find("://");
    size_t path_start = scheme == std::string::npos
                            ? url.find('/')
                            : url.find('/', scheme + 3);
    if (path_start == std::string::npos) {
      base_ = url;
      path_ = "/generate";
    } else {
      base_ = url.substr(0, path_start);
      path_ = url.substr(path_start);
    }
  }

  RemoteBackendOptions options_;
  std::string base_;
  std::string path_;
};

}  // namespace

std::unique_ptr<GeneratorBackend> make_remote_generator(RemoteBackendOptions options) {
  return std::make_unique<RemoteGeneratorBackend>(std::move(options));
}

// ---------------------------------------------------------------------------
// Echo seq2seq

namespace {

std::string first_line(const std::string& rendered_input) {
  size_t nl = rendered_input.find('\n');
  return nl == std::string::npos ? rendered_input : rendered_input.substr(0, nl);
}

class EchoModel : public Seq2SeqModel {
 public:
  std::string kind() const override { return "echo"; }
  // The current utterance occupies the first prompt line.
  std::string generate(const std::string& rendered_input) const override {
    return first_line(rendered_input);
  }
  ordered_json save() const override {
    ordered_json j;
    j["kind"] = "echo";
    return j;
  }
};

// Drives the epoch/validation-check loop shared by the local models.
template <typename CheckFn>
void run_training_loop(const RefinerConfig& config, const ValidationFn& validate,
                       const CheckFn& make_inference) {
  EarlyStopper stopper(config.early_stopping_patience);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (int check = 0; check < config.validation_checks_per_epoch; ++check) {
      if (!validate) continue;
      const double loss = validate(make_inference());
      if (stopper.offer(loss)) return;
    }
  }
}

class EchoSeq2SeqBackend : public Seq2SeqBackend {
 public:
  std::string id() const override { return "echo"; }
  bool is_deterministic() const override { return true; }

  Seq2SeqHandle train(std::span<const RefinementExample> pairs,
                      const RefinerConfig& config,
                      const ValidationFn& validate) override {
    (void)pairs;
    auto model = std::make_shared<EchoModel>();
    run_training_loop(config, validate, [&] {
      return InferenceFn([model](const std::string& input) {
        return model->generate(input);
      });
    });
    return model;
  }

  Seq2SeqHandle load(const json& saved) override {
    if (saved.value("kind", "") != "echo") {
      fail(ErrorKind::Schema, "saved model is not an echo model");
    }
    return std::make_shared<EchoModel>();
  }
};

}  // namespace

std::unique_ptr<Seq2SeqBackend> make_echo_seq2seq() {
  return std::make_unique<EchoSeq2SeqBackend>();
}

// ---------------------------------------------------------------------------
// Denoising seq2seq: learns which tokens show up in generated inputs but never
// in human targets, then deletes them from the current utterance.

namespace {

class DenoiseModel : public Seq2SeqModel {
 public:
  explicit DenoiseModel(std::set<std::string> drop) : drop_(std::move(drop)) {}

  std::string kind() const override { return "denoise"; }

  std::string generate(const std::string& rendered_input) const override {
    const std::string current = first_line(rendered_input);
    std::string out;
    size_t i = 0;
    while (i < current.size()) {
      while (i < current.size() &&
             std::isspace(static_cast<unsigned char>(current[i]))) {
        ++i;
      }
      size_t start = i;
      while (i < current.size() &&
             !std::isspace(static_cast<unsigned char>(current[i]))) {
        ++i;
      }
      if (i == start) break;
      const std::string raw = current.substr(start, i - start);
      std::vector<std::string> norm = tokenize_words(raw);
      const bool dropped = !norm.empty() && drop_.count(norm.front()) > 0;
      if (!dropped) {
        if (!out.empty()) out.push_back(' ');
        out += raw;
      }
    }
    return out;
  }

  ordered_json save() const override {
    ordered_json j;
    j["kind"] = "denoise";
    j["drop"] = drop_;
    return j;
  }

  const std::set<std::string>& drop_tokens() const { return drop_; }

 private:
  std::set<std::string> drop_;
};

class DenoiseSeq2SeqBackend : public Seq2SeqBackend {
 public:
  explicit DenoiseSeq2SeqBackend(int min_input_count)
      : min_input_count_(min_input_count) {
    if (min_input_count_ < 1) {
      fail(ErrorKind::Argument, "min_input_count must be >= 1");
    }
  }

  std::string id() const override { return "denoise"; }
  bool is_deterministic() const override { return true; }

  Seq2SeqHandle train(std::span<const RefinementExample> pairs,
                      const RefinerConfig& config,
                      const ValidationFn& validate) override {
    std::map<std::string, int> input_counts;
    std::set<std::string> target_tokens;
    for (const RefinementExample& ex : pairs) {
      for (const std::string& input : ex.inputs) {
        for (const std::string& token : tokenize_words(input)) {
          ++input_counts[token];
        }
      }
      for (const std::string& target : ex.targets) {
        for (const std::string& token : tokenize_words(target)) {
          target_tokens.insert(token);
        }
      }
    }
    std::set<std::string> drop;
    for (const auto& [token, count] : input_counts) {
      if (count >= min_input_count_ && !target_tokens.count(token)) {
        drop.insert(token);
      }
    }
    auto model = std::make_shared<DenoiseModel>(std::move(drop));
    run_training_loop(config, validate, [&] {
      return InferenceFn([model](const std::string& input) {
        return model->generate(input);
      });
    });
    return model;
  }

  Seq2SeqHandle load(const json& saved) override {
    if (saved.value("kind", "") != "denoise") {
      fail(ErrorKind::Schema, "saved model is not a denoise model");
    }
    return std::make_shared<DenoiseModel>(
        saved.at("drop").get<std::set<std::string>>());
  }

 private:
  int min_input_count_;
};

}  // namespace

std::unique_ptr<Seq2SeqBackend> make_denoise_seq2seq(int min_input_count) {
  return std::make_unique<DenoiseSeq2SeqBackend>(min_input_count);
}

// ---------------------------------------------------------------------------
// Nearest-centroid bag-of-words classifier

namespace {

constexpr double kSimilarityScale = 8.0;

using SparseVector = std::map<std::string, double>;

SparseVector text_vector(const std::string& text) {
  SparseVector v;
  for (const std::string& token : tokenize_words(text)) v[token] += 1.0;
  return v;
}

double norm(const SparseVector& v) {
  double s = 0.0;
  for (const auto& [token, weight] : v) s += weight * weight;
  return std::sqrt(s);
}

double dot(const SparseVector& a, const SparseVector& b) {
  const SparseVector& small = a.size() <= b.size() ? a : b;
  const SparseVector& large = a.size() <= b.size() ? b : a;
  double s = 0.0;
  for (const auto& [token, weight] : small) {
    auto it = large.find(token);
    if (it != large.end()) s += weight * it->second;
  }
  return s;
}

class CentroidModel : public ClassifierModel {
 public:
  explicit CentroidModel(const std::vector<IntentKey>& labels) {
    for (const IntentKey& key : labels) sums_[key];  // fixed label set
  }

  IntentKey predict(const std::string& text) const override {
    const SparseVector v = text_vector(text);
    const IntentKey* best = nullptr;
    double best_score = -2.0;
    for (const auto& [key, sum] : sums_) {
      const double score = similarity(v, sum);
      if (best == nullptr || score > best_score) {
        best = &key;
        best_score = score;
      }
    }
    if (best == nullptr) fail(ErrorKind::Internal, "classifier has no labels");
    return *best;
  }

  double loss(std::span<const LabeledExample> examples) const override {
    if (examples.empty()) fail(ErrorKind::Argument, "loss over empty example set");
    double total = 0.0;
    for (const LabeledExample& ex : examples) {
      const SparseVector v = text_vector(ex.text);
      double max_score = -std::numeric_limits<double>::infinity();
      std::map<IntentKey, double> scores;
      for (const auto& [key, sum] : sums_) {
        const double s = kSimilarityScale * similarity(v, sum);
        scores[key] = s;
        max_score = std::max(max_score, s);
      }
      auto it = scores.find(ex.key);
      if (it == scores.end()) {
        fail(ErrorKind::Consistency, "example intent '" + ex.key.intent +
                                         "' is outside the label set");
      }
      double z = 0.0;
      for (const auto& [key, s] : scores) z += std::exp(s - max_score);
      total += -(it->second - max_score - std::log(z));
    }
    return total / static_cast<double>(examples.size());
  }

  std::vector<IntentKey> labels() const override {
    std::vector<IntentKey> out;
    out.reserve(sums_.size());
    for (const auto& [key, sum] : sums_) out.push_back(key);
    return out;
  }

  std::unique_ptr<ClassifierModel> clone() const override {
    return std::make_unique<CentroidModel>(*this);
  }

  void absorb(const LabeledExample& example) {
    auto it = sums_.find(example.key);
    if (it == sums_.end()) {
      fail(ErrorKind::Consistency, "training example intent '" +
                                       example.key.intent +
                                       "' is outside the label set");
    }
    for (const auto& [token, weight] : text_vector(example.text)) {
      it->second[token] += weight;
    }
  }

 private:
  double similarity(const SparseVector& v, const SparseVector& centroid) const {
    const double nv = norm(v);
    const double nc = norm(centroid);
    if (nv == 0.0 || nc == 0.0) return 0.0;
    return dot(v, centroid) / (nv * nc);
  }

  std::map<IntentKey, SparseVector> sums_;
};

class CentroidClassifierBackend : public ClassifierBackend {
 public:
  std::string id() const override { return "centroid"; }

  ClassifierHandle init(const std::vector<IntentKey>& labels, uint64_t seed) override {
    (void)seed;  // the model is order-insensitive
    if (labels.empty()) fail(ErrorKind::Argument, "classifier needs labels");
    return std::make_shared<CentroidModel>(labels);
  }

  void train_step(ClassifierModel& model,
                  std::span<const LabeledExample> batch) override {
    auto* centroid = dynamic_cast<CentroidModel*>(&model);
    if (centroid == nullptr) {
      fail(ErrorKind::Argument, "model was not created by this backend");
    }
    for (const LabeledExample& ex : batch) centroid->absorb(ex);
  }
};

}  // namespace

std::unique_ptr<ClassifierBackend> make_centroid_classifier() {
  return std::make_unique<CentroidClassifierBackend>();
}

// ---------------------------------------------------------------------------
// Registry

namespace {

template <typename Factory>
class Registry {
 public:
  void add(const std::string& kind, Factory factory) {
    std::lock_guard<std::mutex> lock(mutex_);
    factories_[kind] = std::move(factory);
  }

  const Factory& get(const std::string& kind, const char* role) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = factories_.find(kind);
    if (it == factories_.end()) {
      fail(ErrorKind::Argument, std::string("no registered ") + role +
                                    " backend of kind '" + kind + "'");
    }
    return it->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::string, Factory> factories_;
};

Registry<GeneratorFactory>& generator_registry() {
  static Registry<GeneratorFactory> r;
  return r;
}
Registry<Seq2SeqFactory>& seq2seq_registry() {
  static Registry<Seq2SeqFactory> r;
  return r;
}
Registry<ClassifierFactory>& classifier_registry() {
  static Registry<ClassifierFactory> r;
  return r;
}

void ensure_builtins() {
  static std::once_flag once;
  std::call_once(once, [] {
    generator_registry().add("mock", [](const json& params) {
      if (!params.contains("script")) {
        fail(ErrorKind::Argument, "mock generator needs a 'script' path");
      }
      return make_mock_generator(params.at("script").get<std::string>());
    });
    generator_registry().add("remote", [](const json& params) {
      RemoteBackendOptions options;
      options.endpoint = params.value("endpoint", "");
      options.token = params.value("token", "");
      options.token_probabilities = params.value("token_probabilities", false);
      options.deterministic = params.value("deterministic", false);
      options.timeout_seconds = params.value("timeout_seconds", 60);
      return make_remote_generator(std::move(options));
    });
    seq2seq_registry().add("echo", [](const json&) { return make_echo_seq2seq(); });
    seq2seq_registry().add("denoise", [](const json& params) {
      return make_denoise_seq2seq(params.value("min_count", 3));
    });
    classifier_registry().add("centroid",
                              [](const json&) { return make_centroid_classifier(); });
  });
}

}  // namespace

void register_generator_backend(const std::string& kind, GeneratorFactory factory) {
  ensure_builtins();
  generator_registry().add(kind, std::move(factory));
}

void register_seq2seq_backend(const std::string& kind, Seq2SeqFactory factory) {
  ensure_builtins();
  seq2seq_registry().add(kind, std::move(factory));
}

void register_classifier_backend(const std::string& kind, ClassifierFactory factory) {
  ensure_builtins();
  classifier_registry().add(kind, std::move(factory));
}

std::unique_ptr<GeneratorBackend> make_generator_backend(const BackendSpec& spec) {
  ensure_builtins();
  return generator_registry().get(spec.kind, "generator")(spec.params);
}

std::unique_ptr<Seq2SeqBackend> make_seq2seq_backend(const BackendSpec& spec) {
  ensure_builtins();
  return seq2seq_registry().get(spec.kind, "seq2seq")(spec.params);
}

std::unique_ptr<ClassifierBackend> make_classifier_backend(const BackendSpec& spec) {
  ensure_builtins();
  return classifier_registry().get(spec.kind, "classifier")(spec.params);
}

}  // namespace intentsynth
