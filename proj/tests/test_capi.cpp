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

// Exercises the shared-library surface the way an external consumer would:
// through intentsynth.h only, no internal headers.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "intentsynth.h"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "intentsynth_capi";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

// Minimal two-domain corpus + matching generator script, written by hand in
// the documented artifact formats.
void write_toy_inputs(const fs::path& dir) {
  std::string corpus =
      R"({"record":"descriptor","dataset":"custom","domains":["alpha","beta","gamma"],"intents_per_domain":{"alpha":["aa","ab"],"beta":["ba","bb"],"gamma":["ga","gb"]}})"
      "\n";
  for (const std::string domain : {"alpha", "beta", "gamma"}) {
    for (int which = 0; which < 2; ++which) {
      const std::string intent =
          std::string(1, domain[0]) + (which == 0 ? "a" : "b");
      for (int i = 0; i < 8; ++i) {
        corpus += R"({"record":"example","text":"please )" + intent + "word" +
                  std::to_string(i % 3) + R"( now","intent":")" + intent +
                  R"(","domain":")" + domain +
                  R"(","origin":"human","split":"train"})" "\n";
      }
      for (int i = 0; i < 4; ++i) {
        corpus += R"({"record":"example","text":"kindly )" + intent + "word" +
                  std::to_string(i % 3) + R"( today","intent":")" + intent +
                  R"(","domain":")" + domain +
                  R"(","origin":"human","split":"test"})" "\n";
      }
    }
  }
  write_file(dir / "corpus.jsonl", corpus);

  std::string script;
  for (const std::string domain : {"alpha", "beta", "gamma"}) {
    for (int which = 0; which < 2; ++which) {
      const std::string intent =
          std::string(1, domain[0]) + (which == 0 ? "a" : "b");
      script += R"({"intent":")" + intent + R"(","domain":")" + domain +
                R"(","texts":[)";
      for (int i = 0; i < 12; ++i) {
        if (i) script += ",";
        script += R"("maybe )" + intent + "word" + std::to_string(i % 3) +
                  R"( soon")";
      }
      script += "]}\n";
    }
  }
  write_file(dir / "script.jsonl", script);
}

std::string toy_config_json(const fs::path& dir) {
  return std::string("{") + R"("dataset": "custom",)" +
         R"("data_path": ")" + (dir / "corpus.jsonl").string() + R"(",)" +
         R"("out_dir": ")" + (dir / "out").string() + R"(",)" +
         R"("seed": 51,)" + R"("n_trials": 1,)" +
         R"("strategies": ["zerogen", "refined"],)" +
         R"("generator": {"kind": "mock", "script": ")" +
         (dir / "script.jsonl").string() + R"("},)" +
         R"("seq2seq": {"kind": "echo"},)" +
         R"("classifier": {"kind": "centroid"},)" +
         R"("custom": {"per_intent_generation_count": 8})" + "}";
}

}  // namespace

TEST_CASE("version and error state") {
  CHECK(std::string(intentsynth_version()) == "0.1.0");
  CHECK(std::string(intentsynth_last_error()).empty());
}

TEST_CASE("stateless helpers compute pinned values") {
  double score = 0.0;
  const double probs[] = {0.9, 0.4, 0.1};
  REQUIRE(intentsynth_supergen_score(probs, 3, &score) == INTENTSYNTH_OK);
  CHECK(std::fabs(score - 0.330193) < 1e-6);

  const double bad[] = {0.5, 0.0};
  CHECK(intentsynth_supergen_score(bad, 2, &score) == INTENTSYNTH_ERR_USAGE);
  CHECK(std::string(intentsynth_last_error()).find("probability") !=
        std::string::npos);

  double t = 0.0, p = 1.0;
  int significant = -1;
  const double a[] = {17.2, 15.9, 15.1, 18.7, 16.6};
  const double b[] = {10, 11, 12, 13, 14};
  REQUIRE(intentsynth_paired_t_test(a, b, 5, 0.05, &t, &p, &significant) ==
          INTENTSYNTH_OK);
  CHECK(std::fabs(p - 0.00256) < 1e-3);
  CHECK(significant == 1);

  double d1 = 0.0;
  REQUIRE(intentsynth_distinct_n(
              R"({"booking": ["book a flight", "book now"]})", 1, &d1) ==
          INTENTSYNTH_OK);
  CHECK(std::fabs(d1 - 0.8) < 1e-12);
  CHECK(intentsynth_distinct_n("not json", 1, &d1) == INTENTSYNTH_ERR_USAGE);
}

TEST_CASE("pipeline lifecycle through the C surface") {
  const fs::path dir = temp_dir();
  write_toy_inputs(dir);

  intentsynth_pipeline* pipeline = nullptr;
  REQUIRE(intentsynth_pipeline_open_json(toy_config_json(dir).c_str(), &pipeline) ==
          INTENTSYNTH_OK);
  REQUIRE(pipeline != nullptr);

  SUBCASE("bad option values are usage errors") {
    CHECK(intentsynth_pipeline_set_option(pipeline, "trials", "lots") ==
          INTENTSYNTH_ERR_USAGE);
    CHECK(intentsynth_pipeline_set_option(pipeline, "no_such_key", "1") ==
          INTENTSYNTH_ERR_USAGE);
    CHECK(std::string(intentsynth_pipeline_last_error(pipeline)).find(
              "no_such_key") != std::string::npos);
  }

  SUBCASE("stages run in order; dependencies are reported") {
    CHECK(intentsynth_pipeline_run_stage(pipeline, "evaluate") ==
          INTENTSYNTH_ERR_DEPENDENCY);
    CHECK(intentsynth_pipeline_run_stage(pipeline, "warp") ==
          INTENTSYNTH_ERR_USAGE);

    for (const char* stage : {"split", "generate", "refine", "select", "evaluate",
                              "report"}) {
      INFO("stage: " << stage);
      CHECK(intentsynth_pipeline_run_stage(pipeline, stage) == INTENTSYNTH_OK);
    }
    const std::string report = intentsynth_pipeline_report_text(pipeline);
    CHECK(report.find("strategy") != std::string::npos);
    CHECK(report.find("refined") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "manifest.json"));
    CHECK(fs::exists(dir / "out" / "reports" / "report.txt"));
  }

  intentsynth_pipeline_close(pipeline);

  SUBCASE("open failures") {
    intentsynth_pipeline* bad = nullptr;
    CHECK(intentsynth_pipeline_open((dir / "nope.json").string().c_str(), &bad) ==
          INTENTSYNTH_ERR_USAGE);
    CHECK(bad == nullptr);
    CHECK(intentsynth_pipeline_open_json("{\"dataset\": 7}", &bad) ==
          INTENTSYNTH_ERR_USAGE);
    CHECK(bad == nullptr);
  }
}
