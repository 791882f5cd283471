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

#include "intentsynth.h"

#include <memory>
#include <span>
#include <string>

#include <json.hpp>

#include "errors.hpp"
#include "evalkit.hpp"
#include "genkit.hpp"
#include "runner.hpp"
#include "selection.hpp"

namespace {

using intentsynth::Error;
using intentsynth::ErrorKind;

thread_local std::string g_last_error;

intentsynth_status status_from_kind(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dependency:
      return INTENTSYNTH_ERR_DEPENDENCY;
    case ErrorKind::Backend:
    case ErrorKind::Capability:
      return INTENTSYNTH_ERR_BACKEND;
    case ErrorKind::Internal:
      return INTENTSYNTH_ERR_INTERNAL;
    default:
      return INTENTSYNTH_ERR_USAGE;
  }
}

template <typename Fn>
intentsynth_status guarded(std::string* error_sink, Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    if (error_sink != nullptr) error_sink->clear();
    return INTENTSYNTH_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    if (error_sink != nullptr) *error_sink = e.what();
    return status_from_kind(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    if (error_sink != nullptr) *error_sink = e.what();
    return INTENTSYNTH_ERR_INTERNAL;
  }
}

long long parse_integer(const std::string& value, const std::string& key) {
  try {
    size_t used = 0;
    long long parsed = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    intentsynth::fail(ErrorKind::Argument,
                      "option '" + key + "' needs an integer, got '" + value + "'");
  }
}

}  // namespace

struct intentsynth_pipeline {
  intentsynth::PipelineConfig config;
  std::string last_error;
  std::string report_text;
};

extern "C" {

const char* intentsynth_version(void) { return intentsynth::kVersion; }

const char* intentsynth_last_error(void) { return g_last_error.c_str(); }

intentsynth_status intentsynth_pipeline_open(const char* config_path,
                                             intentsynth_pipeline** out) {
  if (config_path == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return INTENTSYNTH_ERR_USAGE;
  }
  *out = nullptr;
  return guarded(nullptr, [&] {
    auto handle = std::make_unique<intentsynth_pipeline>();
    handle->config = intentsynth::PipelineConfig::from_file(config_path);
    *out = handle.release();
  });
}

intentsynth_status intentsynth_pipeline_open_json(const char* config_json,
                                                  intentsynth_pipeline** out) {
  if (config_json == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return INTENTSYNTH_ERR_USAGE;
  }
  *out = nullptr;
  return guarded(nullptr, [&] {
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::parse_error& e) {
      intentsynth::fail(ErrorKind::Argument,
                        std::string("malformed config JSON: ") + e.what());
    }
    auto handle = std::make_unique<intentsynth_pipeline>();
    handle->config = intentsynth::PipelineConfig::from_json(parsed);
    *out = handle.release();
  });
}

intentsynth_status intentsynth_pipeline_set_option(intentsynth_pipeline* pipeline,
                                                   const char* key,
                                                   const char* value) {
  if (pipeline == nullptr || key == nullptr || value == nullptr) {
    g_last_error = "null argument";
    return INTENTSYNTH_ERR_USAGE;
  }
  return guarded(&pipeline->last_error, [&] {
    const std::string k = key;
    const std::string v = value;
    intentsynth::PipelineConfig& c = pipeline->config;
    if (k == "dataset") {
      c.dataset = intentsynth::dataset_name_from_string(v);
    } else if (k == "data_path") {
      c.data_path = v;
    } else if (k == "trials") {
      c.n_trials = static_cast<int>(parse_integer(v, k));
    } else if (k == "strategies" || k == "strategy") {
      std::vector<std::string> parsed;
      size_t start = 0;
      while (start <= v.size()) {
        size_t comma = v.find(',', start);
        if (comma == std::string::npos) comma = v.size();
        std::string item = v.substr(start, comma - start);
        if (!item.empty()) parsed.push_back(item);
        start = comma + 1;
      }
      c.strategies = parsed;
    } else if (k == "multiplier") {
      c.sample_size_multiplier = static_cast<int>(parse_integer(v, k));
    } else if (k == "seed") {
      c.seed = static_cast<uint64_t>(parse_integer(v, k));
    } else if (k == "out") {
      c.out_dir = v;
    } else if (k == "resume") {
      c.resume = (v == "true" || v == "1");
    } else if (k == "plots") {
      c.plots = (v == "true" || v == "1");
    } else {
      intentsynth::fail(ErrorKind::Argument, "unknown option '" + k + "'");
    }
    c.validate();
  });
}

intentsynth_status intentsynth_pipeline_run_stage(intentsynth_pipeline* pipeline,
                                                  const char* stage) {
  if (pipeline == nullptr || stage == nullptr) {
    g_last_error = "null argument";
    return INTENTSYNTH_ERR_USAGE;
  }
  return guarded(&pipeline->last_error, [&] {
    intentsynth::Pipeline runner(pipeline->config);
    runner.run_stage(stage);
    if (!runner.report_text().empty()) pipeline->report_text = runner.report_text();
  });
}

const char* intentsynth_pipeline_last_error(const intentsynth_pipeline* pipeline) {
  return pipeline == nullptr ? "" : pipeline->last_error.c_str();
}

const char* intentsynth_pipeline_report_text(const intentsynth_pipeline* pipeline) {
  return pipeline == nullptr ? "" : pipeline->report_text.c_str();
}

void intentsynth_pipeline_close(intentsynth_pipeline* pipeline) { delete pipeline; }

intentsynth_status intentsynth_supergen_score(const double* token_probabilities,
                                              size_t n_tokens, double* score_out) {
  if (token_probabilities == nullptr || score_out == nullptr) {
    g_last_error = "null argument";
    return INTENTSYNTH_ERR_USAGE;
  }
  return guarded(nullptr, [&] {
    intentsynth::GenerationRecord record;
    record.text = "-";
    record.token_probabilities.assign(token_probabilities,
                                      token_probabilities + n_tokens);
    *score_out = intentsynth::supergen_score(record);
  });
}

intentsynth_status intentsynth_paired_t_test(const double* a, const double* b,
                                             size_t n, double alpha, double* t_out,
                                             double* p_out, int* significant_out) {
  if (a == nullptr || b == nullptr) {
    g_last_error = "null argument";
    return INTENTSYNTH_ERR_USAGE;
  }
  return guarded(nullptr, [&] {
    intentsynth::TTestResult result = intentsynth::paired_t_test_one_tail(
        std::span<const double>(a, n), std::span<const double>(b, n), alpha);
    if (t_out != nullptr) *t_out = result.t_statistic;
    if (p_out != nullptr) *p_out = result.p_value;
    if (significant_out != nullptr) *significant_out = result.significant ? 1 : 0;
  });
}

intentsynth_status intentsynth_distinct_n(const char* documents_json, int n,
                                          double* value_out) {
  if (documents_json == nullptr || value_out == nullptr) {
    g_last_error = "null argument";
    return INTENTSYNTH_ERR_USAGE;
  }
  return guarded(nullptr, [&] {
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(documents_json);
    } catch (const nlohmann::json::parse_error& e) {
      intentsynth::fail(ErrorKind::Argument,
                        std::string("malformed documents JSON: ") + e.what());
    }
    intentsynth::IntentDocuments documents =
        parsed.get<intentsynth::IntentDocuments>();
    *value_out = intentsynth::distinct_n(documents, n);
  });
}

}  // extern "C"
