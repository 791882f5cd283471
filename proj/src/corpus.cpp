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

#include "corpus.hpp"

#include <algorithm>

#include <json.hpp>

#include "ioutil.hpp"
#include "rand.hpp"
#include "text.hpp"

namespace intentsynth {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(Origin o) {
  switch (o) {
    case Origin::Human: return "human";
    case Origin::Generated: return "generated";
    case Origin::Refined: return "refined";
  }
  return "human";
}

const char* to_string(SplitTag t) {
  switch (t) {
    case SplitTag::Train: return "train";
    case SplitTag::Validation: return "validation";
    case SplitTag::Test: return "test";
    case SplitTag::Unassigned: return "unassigned";
  }
  return "unassigned";
}

Origin origin_from_string(const std::string& s) {
  if (s == "human") return Origin::Human;
  if (s == "generated") return Origin::Generated;
  if (s == "refined") return Origin::Refined;
  fail(ErrorKind::Parse, "unknown origin: " + s);
}

SplitTag split_tag_from_string(const std::string& s) {
  if (s == "train") return SplitTag::Train;
  if (s == "validation") return SplitTag::Validation;
  if (s == "test") return SplitTag::Test;
  if (s == "unassigned") return SplitTag::Unassigned;
  fail(ErrorKind::Parse, "unknown split tag: " + s);
}

const char* to_string(DatasetName n) {
  switch (n) {
    case DatasetName::Clinc150: return "clinc150";
    case DatasetName::Sgd: return "sgd";
    case DatasetName::Custom: return "custom";
  }
  return "custom";
}

DatasetName dataset_name_from_string(const std::string& s) {
  if (s == "clinc150") return DatasetName::Clinc150;
  if (s == "sgd") return DatasetName::Sgd;
  if (s == "custom") return DatasetName::Custom;
  fail(ErrorKind::Parse, "unknown dataset name: " + s);
}

Corpus::Corpus(std::vector<LabeledExample> examples, DatasetDescriptor descriptor)
    : examples_(std::move(examples)), descriptor_(std::move(descriptor)) {
  std::map<std::string, std::string> intent_domain;
  for (size_t i = 0; i < examples_.size(); ++i) {
    const LabeledExample& ex = examples_[i];
    if (trim(ex.text).empty()) {
      fail(ErrorKind::Schema,
           "empty utterance for intent '" + ex.key.intent + "'");
    }
    if (ex.key.intent.empty() || ex.key.domain.empty()) {
      fail(ErrorKind::Schema, "example with empty intent or domain name");
    }
    auto [it, inserted] = intent_domain.emplace(ex.key.intent, ex.key.domain);
    if (!inserted && it->second != ex.key.domain) {
      fail(ErrorKind::Schema, "intent '" + ex.key.intent +
                                  "' appears in two domains: '" + it->second +
                                  "' and '" + ex.key.domain + "'");
    }
    by_intent_[ex.key].push_back(i);
  }
  for (const auto& [key, positions] : by_intent_) {
    auto dit = descriptor_.intents_per_domain.find(key.domain);
    if (dit == descriptor_.intents_per_domain.end() ||
        std::find(dit->second.begin(), dit->second.end(), key.intent) ==
            dit->second.end()) {
      fail(ErrorKind::Consistency, "intent '" + key.intent +
                                       "' missing from descriptor domain '" +
                                       key.domain + "'");
    }
  }
}

std::vector<IntentKey> Corpus::intents() const {
  std::vector<IntentKey> keys;
  keys.reserve(by_intent_.size());
  for (const auto& [key, positions] : by_intent_) keys.push_back(key);
  return keys;
}

std::vector<std::string> Corpus::texts_for(const IntentKey& key) const {
  std::vector<std::string> texts;
  auto it = by_intent_.find(key);
  if (it == by_intent_.end()) return texts;
  texts.reserve(it->second.size());
  for (size_t pos : it->second) texts.push_back(examples_[pos].text);
  return texts;
}

std::set<std::string> Corpus::domain_names() const {
  std::set<std::string> names;
  for (const auto& [key, positions] : by_intent_) names.insert(key.domain);
  return names;
}

namespace {

json parse_json_file(const fs::path& path) {
  if (!fs::exists(path)) fail(ErrorKind::Io, "no such file: " + path.string());
  std::string raw = read_text_file(path);
  try {
    return json::parse(raw);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

DatasetDescriptor descriptor_from_examples(DatasetName name,
                                           const std::vector<LabeledExample>& examples) {
  DatasetDescriptor d;
  d.name = name;
  std::map<std::string, std::set<std::string>> seen;
  for (const LabeledExample& ex : examples) {
    seen[ex.key.domain].insert(ex.key.intent);
  }
  for (const auto& [domain, intents] : seen) {
    d.domains.push_back(domain);
    d.intents_per_domain[domain] =
        std::vector<std::string>(intents.begin(), intents.end());
  }
  return d;
}

void append_clinc_pairs(const json& root, const char* split_key, SplitTag tag,
                        std::vector<LabeledExample>* out) {
  auto it = root.find(split_key);
  if (it == root.end()) {
    fail(ErrorKind::Schema, std::string("missing split key '") + split_key + "'");
  }
  if (!it->is_array()) {
    fail(ErrorKind::Schema, std::string("split '") + split_key + "' is not a list");
  }
  for (const json& pair : *it) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
        !pair[1].is_string()) {
      fail(ErrorKind::Schema,
           std::string("entries under '") + split_key +
               "' must be [utterance, intent] pairs");
    }
    std::string raw_intent = pair[1].get<std::string>();
    std::string intent = canonical_name(raw_intent);
    if (intent == "oos") continue;
    const std::string* domain = clinc150_domain_of(intent);
    if (domain == nullptr) {
      fail(ErrorKind::Schema, "unknown intent name: '" + raw_intent + "'");
    }
    std::string text = trim(pair[0].get<std::string>());
    if (text.empty()) {
      fail(ErrorKind::Schema,
           "intent '" + intent + "' has zero usable utterances (empty text)");
    }
    out->push_back(LabeledExample{std::move(text), IntentKey{intent, *domain},
                                  Origin::Human, tag});
  }
}

}  // namespace

Corpus load_clinc150(const fs::path& path) {
  json root = parse_json_file(path);
  if (!root.is_object()) {
    fail(ErrorKind::Schema, "top-level layout must be an object of splits");
  }
  std::vector<LabeledExample> examples;
  append_clinc_pairs(root, "train", SplitTag::Train, &examples);
  append_clinc_pairs(root, "test", SplitTag::Test, &examples);
  if (examples.empty()) fail(ErrorKind::Schema, "no usable utterances in file");
  DatasetDescriptor desc = descriptor_from_examples(DatasetName::Clinc150, examples);
  return Corpus(std::move(examples), std::move(desc));
}

namespace {

// "Restaurants_2" -> "restaurants", "RideSharing_1" -> "ride_sharing".
std::string sgd_domain_from_service(const std::string& service) {
  std::string base = service;
  size_t us = base.find_last_of('_');
  if (us != std::string::npos &&
      us + 1 < base.size() &&
      base.find_first_not_of("0123456789", us + 1) == std::string::npos) {
    base = base.substr(0, us);
  }
  return canonical_name(base);
}

void append_sgd_dialogue_file(const fs::path& file,
                              std::vector<LabeledExample>* out) {
  json dialogues = parse_json_file(file);
  if (!dialogues.is_array()) {
    fail(ErrorKind::Schema, "dialogue file is not a list: " + file.string());
  }
  static const std::set<std::string> kKnownDomains(sgd_domains().begin(),
                                                   sgd_domains().end());
  for (const json& dialogue : dialogues) {
    auto turns = dialogue.find("turns");
    if (turns == dialogue.end() || !turns->is_array()) continue;
    for (const json& turn : *turns) {
      if (turn.value("speaker", "") != "USER") continue;
      std::string text = trim(turn.value("utterance", ""));
      if (text.empty()) continue;
      auto frames = turn.find("frames");
      if (frames == turn.end() || !frames->is_array()) continue;
      for (const json& frame : *frames) {
        auto state = frame.find("state");
        if (state == frame.end() || !state->is_object()) continue;
        std::string active = state->value("active_intent", "NONE");
        if (active.empty() || active == "NONE") continue;
        std::string service = frame.value("service", "");
        if (service.empty()) continue;
        std::string domain = sgd_domain_from_service(service);
        if (!kKnownDomains.count(domain)) {
          fail(ErrorKind::Schema,
               "unknown service '" + service + "' in " + file.string());
        }
        out->push_back(LabeledExample{text,
                                      IntentKey{canonical_name(active), domain},
                                      Origin::Human, SplitTag::Unassigned});
        break;  // one example per user turn
      }
    }
  }
}

}  // namespace

Corpus load_sgd_merged(const fs::path& path) {
  if (!fs::exists(path) || !fs::is_directory(path)) {
    fail(ErrorKind::Io, "no such dataset directory: " + path.string());
  }
  std::vector<fs::path> files;
  for (const char* split : {"train", "dev", "test"}) {
    fs::path dir = path / split;
    if (!fs::exists(dir)) continue;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.rfind("dialogues_", 0) == 0 &&
          entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
  }
  if (files.empty()) {
    fail(ErrorKind::Io, "no dialogues_*.json files under " + path.string());
  }
  std::sort(files.begin(), files.end());
  std::vector<LabeledExample> examples;
  for (const fs::path& file : files) append_sgd_dialogue_file(file, &examples);
  if (examples.empty()) {
    fail(ErrorKind::Schema, "no user turns with active intents found");
  }
  DatasetDescriptor desc = descriptor_from_examples(DatasetName::Sgd, examples);
  return Corpus(std::move(examples), std::move(desc));
}

Corpus corpus_from_examples(DatasetName name, std::vector<LabeledExample> examples) {
  DatasetDescriptor desc = descriptor_from_examples(name, examples);
  return Corpus(std::move(examples), std::move(desc));
}

Corpus cap_per_intent(const Corpus& corpus, size_t max_n, uint64_t seed) {
  if (max_n < 1) fail(ErrorKind::Argument, "per-intent cap must be >= 1");
  std::vector<bool> keep(corpus.size(), false);
  for (const auto& [key, positions] : corpus.by_intent()) {
    if (positions.size() <= max_n) {
      for (size_t pos : positions) keep[pos] = true;
      continue;
    }
    Rng rng(seed_stream(seed, "cap", key.intent, key.domain));
    for (size_t local : rng.sample_indices(positions.size(), max_n)) {
      keep[positions[local]] = true;
    }
  }
  std::vector<LabeledExample> retained;
  retained.reserve(corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (keep[i]) retained.push_back(corpus.examples()[i]);
  }
  return Corpus(std::move(retained), corpus.descriptor());
}

namespace {

Corpus filter_impl(const Corpus& corpus, const std::set<std::string>& domains,
                   const SplitTag* keep_split) {
  std::vector<LabeledExample> kept;
  for (const LabeledExample& ex : corpus.examples()) {
    if (!domains.count(ex.key.domain)) continue;
    if (keep_split != nullptr && ex.split != *keep_split) continue;
    kept.push_back(ex);
  }
  DatasetDescriptor desc;
  desc.name = corpus.descriptor().name;
  for (const std::string& domain : corpus.descriptor().domains) {
    if (!domains.count(domain)) continue;
    desc.domains.push_back(domain);
    auto it = corpus.descriptor().intents_per_domain.find(domain);
    if (it != corpus.descriptor().intents_per_domain.end()) {
      desc.intents_per_domain[domain] = it->second;
    }
  }
  return Corpus(std::move(kept), std::move(desc));
}

}  // namespace

Corpus filter_by_domains(const Corpus& corpus, const std::set<std::string>& domains) {
  return filter_impl(corpus, domains, nullptr);
}

Corpus filter_by_domains(const Corpus& corpus, const std::set<std::string>& domains,
                         SplitTag keep_split) {
  return filter_impl(corpus, domains, &keep_split);
}

void save_corpus_jsonl(const Corpus& corpus, const fs::path& path) {
  std::string out;
  ordered_json header;
  header["record"] = "descriptor";
  header["dataset"] = to_string(corpus.descriptor().name);
  header["domains"] = corpus.descriptor().domains;
  header["intents_per_domain"] = corpus.descriptor().intents_per_domain;
  out += header.dump();
  out += '\n';
  for (const LabeledExample& ex : corpus.examples()) {
    ordered_json line;
    line["record"] = "example";
    line["text"] = ex.text;
    line["intent"] = ex.key.intent;
    line["domain"] = ex.key.domain;
    line["origin"] = to_string(ex.origin);
    line["split"] = to_string(ex.split);
    out += line.dump();
    out += '\n';
  }
  write_text_atomic(path, out);
}

Corpus load_corpus_jsonl(const fs::path& path) {
  if (!fs::exists(path)) fail(ErrorKind::Io, "no such file: " + path.string());
  std::string raw = read_text_file(path);
  std::vector<std::string> lines = split_lines(raw);
  if (lines.empty()) fail(ErrorKind::Schema, "empty corpus file: " + path.string());

  DatasetDescriptor desc;
  std::vector<LabeledExample> examples;
  bool saw_descriptor = false;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    json line;
    try {
      line = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::Parse, "bad JSONL line " + std::to_string(i + 1) + " in " +
                                 path.string() + ": " + e.what());
    }
    const std::string record = line.value("record", "");
    if (record == "descriptor") {
      desc.name = dataset_name_from_string(line.at("dataset").get<std::string>());
      desc.domains = line.at("domains").get<std::vector<std::string>>();
      desc.intents_per_domain =
          line.at("intents_per_domain")
              .get<std::map<std::string, std::vector<std::string>>>();
      saw_descriptor = true;
    } else if (record == "example") {
      LabeledExample ex;
      ex.text = line.at("text").get<std::string>();
      ex.key.intent = line.at("intent").get<std::string>();
      ex.key.domain = line.at("domain").get<std::string>();
      ex.origin = origin_from_string(line.at("origin").get<std::string>());
      ex.split = split_tag_from_string(line.at("split").get<std::string>());
      examples.push_back(std::move(ex));
    } else {
      fail(ErrorKind::Schema, "unknown record type on line " + std::to_string(i + 1));
    }
  }
  if (!saw_descriptor) {
    fail(ErrorKind::Schema, "corpus file lacks a descriptor record");
  }
  return Corpus(std::move(examples), std::move(desc));
}

}  // namespace intentsynth
