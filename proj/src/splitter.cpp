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

#include "splitter.hpp"

#include <algorithm>

#include "errors.hpp"
#include "rand.hpp"

namespace intentsynth {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr size_t kSgdSeenCap = 200;
constexpr int kDistinctDrawAttempts = 512;

}  // namespace

std::set<std::string> ExperimentPlan::seen_domains() const {
  std::set<std::string> all = seen_train_domains;
  all.insert(seen_val_domains.begin(), seen_val_domains.end());
  return all;
}

ordered_json ExperimentPlan::to_json() const {
  ordered_json j;
  j["trial_id"] = trial_id;
  j["seed"] = seed;
  j["unseen_domains"] = unseen_domains;
  j["seen_train_domains"] = seen_train_domains;
  j["seen_val_domains"] = seen_val_domains;
  j["per_intent_generation_count"] = per_intent_generation_count;
  return j;
}

ExperimentPlan ExperimentPlan::from_json(const json& j) {
  ExperimentPlan p;
  p.trial_id = j.at("trial_id").get<int>();
  p.seed = j.at("seed").get<uint64_t>();
  p.unseen_domains = j.at("unseen_domains").get<std::set<std::string>>();
  p.seen_train_domains = j.at("seen_train_domains").get<std::set<std::string>>();
  p.seen_val_domains = j.at("seen_val_domains").get<std::set<std::string>>();
  p.per_intent_generation_count = j.at("per_intent_generation_count").get<int>();
  return p;
}

std::vector<ExperimentPlan> plan_trials(const std::vector<std::string>& domains,
                                        size_t n_unseen, size_t n_val,
                                        int per_intent_generation_count,
                                        uint64_t seed, int n_trials) {
  if (n_trials < 1) fail(ErrorKind::Argument, "n_trials must be >= 1");
  if (per_intent_generation_count < 1) {
    fail(ErrorKind::Argument, "per_intent_generation_count must be >= 1");
  }
  if (n_unseen + n_val >= domains.size()) {
    fail(ErrorKind::Argument, "domain inventory too small for the requested partition");
  }
  std::set<std::string> unique(domains.begin(), domains.end());
  if (unique.size() != domains.size()) {
    fail(ErrorKind::Argument, "domain inventory contains duplicates");
  }

  std::vector<ExperimentPlan> plans;
  std::set<std::set<std::string>> used_unseen;
  for (int trial = 0; trial < n_trials; ++trial) {
    const uint64_t trial_seed = seed_stream(seed, "trial", static_cast<uint64_t>(trial));
    Rng rng(trial_seed);
    ExperimentPlan plan;
    for (int attempt = 0; attempt < kDistinctDrawAttempts; ++attempt) {
      std::vector<std::string> pool = domains;
      rng.shuffle(pool);
      std::set<std::string> unseen(pool.begin(), pool.begin() + n_unseen);

      std::vector<std::string> remaining(pool.begin() + n_unseen, pool.end());
      rng.shuffle(remaining);

      plan.trial_id = trial;
      plan.seed = trial_seed;
      plan.unseen_domains = std::move(unseen);
      plan.seen_val_domains.clear();
      plan.seen_train_domains.clear();
      plan.seen_val_domains.insert(remaining.begin(), remaining.begin() + n_val);
      plan.seen_train_domains.insert(remaining.begin() + n_val, remaining.end());
      plan.per_intent_generation_count = per_intent_generation_count;
      if (used_unseen.insert(plan.unseen_domains).second) break;
      // duplicate unseen set; redraw unless the inventory is exhausted
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

std::vector<ExperimentPlan> plan_clinc150_trials(uint64_t seed, int n_trials) {
  return plan_trials(clinc150_domains(), 5, 1, 100, seed, n_trials);
}

std::vector<ExperimentPlan> plan_sgd_trials(uint64_t seed, int n_trials) {
  return plan_trials(sgd_domains(), 8, 3, 200, seed, n_trials);
}

TrialBundle materialize_trial(const ExperimentPlan& plan, const Corpus& corpus) {
  const std::set<std::string> corpus_domains = corpus.domain_names();
  std::set<std::string> planned = plan.unseen_domains;
  planned.insert(plan.seen_train_domains.begin(), plan.seen_train_domains.end());
  planned.insert(plan.seen_val_domains.begin(), plan.seen_val_domains.end());
  for (const std::string& domain : planned) {
    if (!corpus_domains.count(domain)) {
      fail(ErrorKind::Consistency,
           "plan references domain '" + domain + "' absent from the corpus");
    }
  }

  const std::set<std::string> seen = plan.seen_domains();
  TrialBundle bundle;
  bundle.plan = plan;

  const DatasetName kind = corpus.descriptor().name;
  if (kind == DatasetName::Sgd) {
    // Seen-domain data is capped per intent before routing; every unseen-domain
    // human example becomes test data.
    Corpus seen_all = filter_by_domains(corpus, seen);
    Corpus capped = cap_per_intent(seen_all, kSgdSeenCap, plan.seed);
    bundle.seen_train = capped;
    bundle.seen_val = filter_by_domains(capped, plan.seen_val_domains);
    bundle.unseen_test = filter_by_domains(corpus, plan.unseen_domains);
  } else {
    // Train-split examples feed the seen pools; unseen test uses the test split.
    bundle.seen_train = filter_by_domains(corpus, seen, SplitTag::Train);
    bundle.seen_val =
        filter_by_domains(corpus, plan.seen_val_domains, SplitTag::Train);
    bundle.unseen_test =
        filter_by_domains(corpus, plan.unseen_domains, SplitTag::Test);
  }

  std::set<IntentKey> seen_intents;
  for (const IntentKey& key : bundle.seen_train.intents()) seen_intents.insert(key);
  Corpus unseen_all = filter_by_domains(corpus, plan.unseen_domains);
  for (const IntentKey& key : unseen_all.intents()) {
    if (seen_intents.count(key)) {
      fail(ErrorKind::Consistency,
           "intent '" + key.intent + "' appears on both sides of the split");
    }
    bundle.unseen_intents.push_back(key);
  }
  return bundle;
}

}  // namespace intentsynth
