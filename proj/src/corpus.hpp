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

#ifndef INTENTSYNTH_CORPUS_HPP
#define INTENTSYNTH_CORPUS_HPP

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace intentsynth {

// (intent, domain) pair with canonical lower-case names. Within one corpus an
// intent name belongs to exactly one domain.
struct IntentKey {
  std::string intent;
  std::string domain;

  auto operator<=>(const IntentKey&) const = default;
};

enum class Origin { Human, Generated, Refined };
enum class SplitTag { Train, Validation, Test, Unassigned };

const char* to_string(Origin o);
const char* to_string(SplitTag t);
Origin origin_from_string(const std::string& s);
SplitTag split_tag_from_string(const std::string& s);

struct LabeledExample {
  std::string text;
  IntentKey key;
  Origin origin = Origin::Human;
  SplitTag split = SplitTag::Unassigned;

  bool operator==(const LabeledExample&) const = default;
};

enum class DatasetName { Clinc150, Sgd, Custom };

const char* to_string(DatasetName n);
DatasetName dataset_name_from_string(const std::string& s);

struct DatasetDescriptor {
  DatasetName name = DatasetName::Custom;
  std::vector<std::string> domains;
  std::map<std::string, std::vector<std::string>> intents_per_domain;

  bool operator==(const DatasetDescriptor&) const = default;
};

// Immutable collection of labeled utterances with a per-intent index.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<LabeledExample> examples, DatasetDescriptor descriptor);

  const std::vector<LabeledExample>& examples() const { return examples_; }
  const DatasetDescriptor& descriptor() const { return descriptor_; }
  const std::map<IntentKey, std::vector<size_t>>& by_intent() const {
    return by_intent_;
  }

  std::vector<IntentKey> intents() const;
  size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }

  std::vector<std::string> texts_for(const IntentKey& key) const;
  std::set<std::string> domain_names() const;

  bool operator==(const Corpus& other) const {
    return examples_ == other.examples_ && descriptor_ == other.descriptor_;
  }

 private:
  std::vector<LabeledExample> examples_;
  std::map<IntentKey, std::vector<size_t>> by_intent_;
  DatasetDescriptor descriptor_;
};

// Loads the published single-file layout: lists of [utterance, intent] pairs
// under the "train" and "test" keys. Out-of-scope ("oos") entries are
// skipped; every other intent must belong to the built-in 150-intent table.
Corpus load_clinc150(const std::filesystem::path& path);

// Loads a schema-guided dialogue directory (train/dev/test subdirectories of
// dialogues_*.json files), merging all splits. One example per user turn that
// carries an active intent; system turns and intent-less turns are dropped;
// every example gets SplitTag::Unassigned.
Corpus load_sgd_merged(const std::filesystem::path& path);

// Seeded uniform subsampling down to max_n examples per intent. Intents at or
// below the cap are untouched; relative order of retained examples is kept.
Corpus cap_per_intent(const Corpus& corpus, size_t max_n, uint64_t seed);

// Restrict to the given domains (descriptor restricted too). When keep_split
// is set, only examples with that tag survive.
Corpus filter_by_domains(const Corpus& corpus, const std::set<std::string>& domains);
Corpus filter_by_domains(const Corpus& corpus, const std::set<std::string>& domains,
                         SplitTag keep_split);

void save_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus_jsonl(const std::filesystem::path& path);

// Corpus with a descriptor derived from the examples themselves.
Corpus corpus_from_examples(DatasetName name, std::vector<LabeledExample> examples);

// Built-in catalogs. The raw intent-detection file does not carry domain
// labels, so the 10-domain / 150-intent grouping ships as a static table.
const std::map<std::string, std::vector<std::string>>& clinc150_intent_table();
const std::vector<std::string>& clinc150_domains();
const std::string* clinc150_domain_of(const std::string& intent);
const std::vector<std::string>& sgd_domains();

}  // namespace intentsynth

#endif  // INTENTSYNTH_CORPUS_HPP
