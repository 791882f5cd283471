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

// Command-line driver for the pipeline. Deliberately thin: every verb maps to
// one shared-library stage call, so anything the CLI can do is also reachable
// through the C API.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "intentsynth.h"

namespace {

struct CommonArgs {
  std::string config;
  std::string dataset;
  std::string out;
  std::string strategy;
  int trials = -1;
  int multiplier = -1;
  long long seed = -1;
  bool no_resume = false;
  bool plots = false;
};

void add_common_options(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config, "pipeline config JSON file")->required();
  cmd->add_option("--dataset", args->dataset, "dataset override (clinc150|sgd|custom)");
  cmd->add_option("--trials", args->trials, "number of trials override");
  cmd->add_option("--strategy", args->strategy,
                  "comma-separated strategy list override");
  cmd->add_option("--multiplier", args->multiplier,
                  "evaluation sample-size multiplier (1 or 2)");
  cmd->add_option("--seed", args->seed, "root seed override");
  cmd->add_option("--out", args->out, "output directory override");
  cmd->add_flag("--no-resume", args->no_resume,
                "regenerate artifacts instead of skipping completed ones");
  cmd->add_flag("--resume", [](size_t) {}, "skip completed artifacts (default)");
}

int exit_code(intentsynth_status status) {
  switch (status) {
    case INTENTSYNTH_OK: return 0;
    case INTENTSYNTH_ERR_USAGE: return 1;
    case INTENTSYNTH_ERR_DEPENDENCY: return 2;
    default: return 3;
  }
}

using PipelinePtr =
    std::unique_ptr<intentsynth_pipeline, decltype(&intentsynth_pipeline_close)>;

int fail_with(const intentsynth_pipeline* pipeline, intentsynth_status status) {
  const char* message = pipeline != nullptr && *intentsynth_pipeline_last_error(pipeline)
                            ? intentsynth_pipeline_last_error(pipeline)
                            : intentsynth_last_error();
  std::fprintf(stderr, "error: %s\n", message);
  return exit_code(status);
}

int run_stage(const CommonArgs& args, const std::string& stage) {
  intentsynth_pipeline* raw = nullptr;
  intentsynth_status status = intentsynth_pipeline_open(args.config.c_str(), &raw);
  if (status != INTENTSYNTH_OK) return fail_with(nullptr, status);
  PipelinePtr pipeline(raw, &intentsynth_pipeline_close);

  auto set = [&](const char* key, const std::string& value) {
    if (status != INTENTSYNTH_OK) return;
    status = intentsynth_pipeline_set_option(pipeline.get(), key, value.c_str());
  };
  if (!args.dataset.empty()) set("dataset", args.dataset);
  if (!args.out.empty()) set("out", args.out);
  if (!args.strategy.empty()) set("strategies", args.strategy);
  if (args.trials >= 0) set("trials", std::to_string(args.trials));
  if (args.multiplier >= 0) set("multiplier", std::to_string(args.multiplier));
  if (args.seed >= 0) set("seed", std::to_string(args.seed));
  if (args.no_resume) set("resume", "false");
  if (args.plots) set("plots", "true");
  if (status != INTENTSYNTH_OK) return fail_with(pipeline.get(), status);

  status = intentsynth_pipeline_run_stage(pipeline.get(), stage.c_str());
  if (status != INTENTSYNTH_OK) return fail_with(pipeline.get(), status);

  if (stage == "report") {
    std::printf("%s", intentsynth_pipeline_report_text(pipeline.get()));
  } else {
    std::printf("%s: done\n", stage.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic training data pipeline for zero-resource intent "
               "detection (generate, refine, select, evaluate)"};
  app.set_version_flag("--version", intentsynth_version());
  app.require_subcommand(1);

  const std::vector<std::string> stages = {"split",  "generate", "refine",
                                           "select", "evaluate", "report"};
  const std::vector<std::string> help = {
      "load the dataset and draw seeded domain partitions",
      "produce utterances for every intent through the generator backend",
      "train the refinement model on seen domains and refine unseen output",
      "materialize baseline strategies (zerogen passthrough, supergen top-k)",
      "train classifiers per strategy and score accuracy plus diversity",
      "print and store the aggregated results table"};

  std::vector<CommonArgs> args(stages.size());
  for (size_t i = 0; i < stages.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(stages[i], help[i]);
    add_common_options(cmd, &args[i]);
    if (stages[i] == "report") {
      cmd->add_flag("--plots", args[i].plots, "also write SVG bar charts");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // usage problems exit 1
  }

  for (size_t i = 0; i < stages.size(); ++i) {
    if (app.got_subcommand(stages[i])) return run_stage(args[i], stages[i]);
  }
  return 1;
}
