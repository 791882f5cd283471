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

#ifndef INTENTSYNTH_SELECTION_HPP
#define INTENTSYNTH_SELECTION_HPP

#include <cstddef>
#include <vector>

#include "genkit.hpp"

namespace intentsynth {

struct ScoredUtterance {
  GenerationRecord record;
  double score = 0.0;           // geometric mean of the token probabilities
  size_t generation_index = 0;  // position in the original generation order
};

// Passthrough baseline: content untouched, strategy stamped.
std::vector<GenerationRecord> zerogen_select(const std::vector<GenerationRecord>& records);

// Geometric mean of the record's token probabilities, computed in log space
// so long sequences do not underflow.
double supergen_score(const GenerationRecord& record);

std::vector<ScoredUtterance> score_records(const std::vector<GenerationRecord>& records);

// The `keep` highest-scoring records, sorted by descending score with ties
// broken by earlier generation index.
std::vector<GenerationRecord> supergen_select(const std::vector<ScoredUtterance>& scored,
                                              size_t keep);

}  // namespace intentsynth

#endif  // INTENTSYNTH_SELECTION_HPP
