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

#include "rand.hpp"

#include <algorithm>

namespace intentsynth {

namespace {

constexpr uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr uint64_t kFnvPrime = 1099511628211ULL;

uint64_t fnv1a(uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

uint64_t fnv1a(uint64_t h, uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace

uint64_t hash_mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t seed_stream(uint64_t root, std::string_view name) {
  return hash_mix(fnv1a(fnv1a(kFnvOffset, root), name));
}

uint64_t seed_stream(uint64_t root, std::string_view name, uint64_t a) {
  return hash_mix(fnv1a(fnv1a(fnv1a(kFnvOffset, root), name), a));
}

uint64_t seed_stream(uint64_t root, std::string_view name, uint64_t a,
                     std::string_view b) {
  return hash_mix(fnv1a(fnv1a(fnv1a(fnv1a(kFnvOffset, root), name), a), b));
}

uint64_t seed_stream(uint64_t root, std::string_view name, std::string_view a,
                     std::string_view b) {
  return hash_mix(fnv1a(fnv1a(fnv1a(fnv1a(kFnvOffset, root), name), a), b));
}

size_t Rng::index(size_t n) {
  if (n == 0) return 0;
  const uint64_t bound = static_cast<uint64_t>(n);
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t v = engine_();
  while (v >= limit) v = engine_();
  return static_cast<size_t>(v % bound);
}

double Rng::real01() {
  // 53 random bits, as in the canonical double conversion.
  return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
}

std::vector<size_t> Rng::sample_indices(size_t n, size_t k) {
  if (k >= n) {
    std::vector<size_t> all(n);
    for (size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  // Floyd's algorithm; ascending output keeps callers order-preserving.
  std::vector<size_t> chosen;
  std::vector<bool> taken(n, false);
  chosen.reserve(k);
  for (size_t j = n - k; j < n; ++j) {
    size_t t = index(j + 1);
    if (taken[t]) t = j;
    taken[t] = true;
    chosen.push_back(t);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace intentsynth
