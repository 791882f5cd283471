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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rand.hpp"
#include "stats.hpp"
#include "text.hpp"

using namespace intentsynth;

TEST_SUITE("text") {
  TEST_CASE("canonical_name handles camel case and separators") {
    CHECK(canonical_name("FindRestaurants") == "find_restaurants");
    CHECK(canonical_name("RideSharing") == "ride_sharing");
    CHECK(canonical_name("kitchen/dining") == "kitchen_dining");
    CHECK(canonical_name("  freeze_account ") == "freeze_account");
    CHECK(canonical_name("GetCarsAvailable") == "get_cars_available");
    CHECK(canonical_name("w2") == "w2");
    CHECK(canonical_name("Auto - Commute") == "auto_commute");
  }

  TEST_CASE("tokenize_words strips edge punctuation and lower-cases") {
    auto tokens = tokenize_words("Book a flight, NOW! (really)");
    REQUIRE(tokens.size() == 5);
    CHECK(tokens[0] == "book");
    CHECK(tokens[2] == "flight");
    CHECK(tokens[3] == "now");
    CHECK(tokens[4] == "really");
    CHECK(tokenize_words("don't stop") ==
          std::vector<std::string>{"don't", "stop"});
    CHECK(tokenize_words("  \t ").empty());
  }

  TEST_CASE("number words") {
    CHECK(number_word(1) == "one");
    CHECK(number_word(3) == "three");
    CHECK(number_word(20) == "twenty");
    CHECK(number_word(42) == "42");
  }

  TEST_CASE("seed streams are stable and name-sensitive") {
    CHECK(seed_stream(7, "a") == seed_stream(7, "a"));
    CHECK(seed_stream(7, "a") != seed_stream(7, "b"));
    CHECK(seed_stream(7, "a", 1) != seed_stream(7, "a", 2));
    CHECK(seed_stream(7, "a", "x", "y") != seed_stream(7, "a", "y", "x"));
  }

  TEST_CASE("rng index is within bounds and shuffle is a permutation") {
    Rng rng(123);
    for (int i = 0; i < 1000; ++i) CHECK(rng.index(7) < 7);
    std::vector<int> v = {1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> shuffled = v;
    rng.shuffle(shuffled);
    std::sort(shuffled.begin(), shuffled.end());
    CHECK(shuffled == v);
  }

  TEST_CASE("sample_indices draws distinct ascending indices") {
    Rng rng(99);
    auto picks = rng.sample_indices(100, 10);
    REQUIRE(picks.size() == 10);
    for (size_t i = 1; i < picks.size(); ++i) CHECK(picks[i] > picks[i - 1]);
    CHECK(picks.back() < 100);
  }

  TEST_CASE("student t survival function matches quadrature") {
    // Independent oracle: Simpson integration of the unnormalized density,
    // normalized by the full-line integral.
    auto density = [](double x, double df) {
      return std::pow(1.0 + x * x / df, -(df + 1.0) / 2.0);
    };
    auto simpson = [&](double lo, double hi, double df) {
      const int steps = 20000;
      const double h = (hi - lo) / steps;
      double area = 0.0;
      for (int i = 0; i < steps; ++i) {
        const double a = lo + i * h;
        area += h / 6.0 *
                (density(a, df) + 4.0 * density(a + h / 2.0, df) + density(a + h, df));
      }
      return area;
    };
    auto quad_sf = [&](double t, double df) {
      return simpson(t, 80.0, df) / simpson(-80.0, 80.0, df);
    };
    for (double t : {0.5, 1.0, 2.0, 5.566}) {
      for (double df : {4.0, 9.0}) {  // tails die fast enough for truncation
        CHECK(student_t_sf(t, df) == doctest::Approx(quad_sf(t, df)).epsilon(1e-5));
      }
    }
    // df = 2 has the closed form S(t) = (1 - t / sqrt(t^2 + 2)) / 2.
    for (double t : {0.5, 1.0, 2.0, 5.566}) {
      const double closed = 0.5 * (1.0 - t / std::sqrt(t * t + 2.0));
      CHECK(student_t_sf(t, 2.0) == doctest::Approx(closed).epsilon(1e-10));
    }
    CHECK(student_t_sf(0.0, 4.0) == 0.5);
    CHECK(student_t_sf(-2.0, 4.0) == doctest::Approx(1.0 - student_t_sf(2.0, 4.0)));
  }
}
