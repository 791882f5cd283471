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

#include "selection.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace intentsynth {

std::vector<GenerationRecord> zerogen_select(const std::vector<GenerationRecord>& records) {
  std::vector<GenerationRecord> out = records;
  for (GenerationRecord& r : out) r.strategy = "zerogen";
  return out;
}

double supergen_score(const GenerationRecord& record) {
  if (record.token_probabilities.empty()) {
    fail(ErrorKind::Capability,
         "record has no token probabilities; confidence scoring needs them");
  }
  double log_sum = 0.0;
  for (double p : record.token_probabilities) {
    if (!(p > 0.0) || p > 1.0) {
      fail(ErrorKind::Argument, "token probability outside (0, 1]");
    }
    log_sum += std::log(p);
  }
  return std::exp(log_sum / static_cast<double>(record.token_probabilities.size()));
}

std::vector<ScoredUtterance> score_records(const std::vector<GenerationRecord>& records) {
  std::vector<ScoredUtterance> scored;
  scored.reserve(records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    scored.push_back(ScoredUtterance{records[i], supergen_score(records[i]), i});
  }
  return scored;
}

std::vector<GenerationRecord> supergen_select(const std::vector<ScoredUtterance>& scored,
                                              size_t keep) {
  if (keep > scored.size()) {
    fail(ErrorKind::Argument, "cannot keep " + std::to_string(keep) +
                                  " records out of " + std::to_string(scored.size()));
  }
  std::vector<const ScoredUtterance*> order;
  order.reserve(scored.size());
  for (const ScoredUtterance& s : scored) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const ScoredUtterance* a, const ScoredUtterance* b) {
              if (a->score != b->score) return a->score > b->score;
              return a->generation_index < b->generation_index;
            });
  std::vector<GenerationRecord> out;
  out.reserve(keep);
  for (size_t i = 0; i < keep; ++i) {
    GenerationRecord r = order[i]->record;
    r.strategy = "supergen";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace intentsynth
