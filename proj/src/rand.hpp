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

#ifndef INTENTSYNTH_RAND_HPP
#define INTENTSYNTH_RAND_HPP

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace intentsynth {

// All randomness in the pipeline flows through named seed streams derived
// from one root seed. std::mt19937_64 output is fully specified by the
// standard; the helpers below avoid std::uniform_int_distribution and
// std::shuffle, whose results are implementation-defined, so artifacts are
// byte-identical across standard libraries.

uint64_t hash_mix(uint64_t x);  // splitmix64 finalizer

uint64_t seed_stream(uint64_t root, std::string_view name);
uint64_t seed_stream(uint64_t root, std::string_view name, uint64_t a);
uint64_t seed_stream(uint64_t root, std::string_view name, uint64_t a,
                     std::string_view b);
uint64_t seed_stream(uint64_t root, std::string_view name, std::string_view a,
                     std::string_view b);

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform index in [0, n), rejection-sampled.
  size_t index(size_t n);

  // Uniform double in [0, 1).
  double real01();

  template <typename T>
  void shuffle(std::vector<T>& values) {
    if (values.size() < 2) return;
    for (size_t i = values.size() - 1; i > 0; --i) {
      size_t j = index(i + 1);
      std::swap(values[i], values[j]);
    }
  }

  // k distinct indices drawn uniformly from [0, n), returned ascending.
  std::vector<size_t> sample_indices(size_t n, size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace intentsynth

#endif  // INTENTSYNTH_RAND_HPP
