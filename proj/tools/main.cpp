// Copyright 2026 The idxqual Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "idxqual/commands.hpp"
#include "idxqual/error.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;

  idxqual::CommandOptions options() const {
    idxqual::CommandOptions o;
    o.config = config;
    o.seed = seed;
    if (out) o.out = *out;
    o.threads = threads;
    return o;
  }
};

void add_common(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "Override the configured seed");
  cmd->add_option("--out", flags.out, "Output directory (must exist)");
  cmd->add_option("--threads", flags.threads, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quality estimation for automatic subject indexing"};
  app.require_subcommand(1);

  Flags flags;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus and vocabulary");
  add_common(synth, flags);
  auto* run = app.add_subcommand("run", "Nested cross-validation of the recall estimator");
  add_common(run, flags);
  auto* ablate = app.add_subcommand("ablate", "Feature-group ablation and isolation");
  add_common(ablate, flags);
  auto* train = app.add_subcommand("train", "Train a model bundle on a whole corpus");
  add_common(train, flags);

  std::string estimates, sweep_out;
  std::optional<std::string> sweep_config;
  auto* sweep = app.add_subcommand("sweep", "Re-threshold an estimates.jsonl dump");
  sweep->add_option("--estimates", estimates, "estimates.jsonl from run")->required()->check(CLI::ExistingFile);
  sweep->add_option("--config", sweep_config, "Config providing the threshold grid");
  sweep->add_option("--out", sweep_out, "Output directory (must exist)")->required();

  std::string bundle, corpus, predict_out;
  auto* predict = app.add_subcommand("predict", "Apply a model bundle to a JSON-lines corpus");
  predict->add_option("--model", bundle, "model.json from train")->required()->check(CLI::ExistingFile);
  predict->add_option("--corpus", corpus, "JSON-lines documents with id and text")->required()->check(CLI::ExistingFile);
  predict->add_option("--out", predict_out, "Output directory (must exist)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) idxqual::cmd_synth(flags.options(), std::cout);
    if (run->parsed()) idxqual::cmd_run(flags.options(), std::cout);
    if (ablate->parsed()) idxqual::cmd_ablate(flags.options(), std::cout);
    if (train->parsed()) idxqual::cmd_train(flags.options(), std::cout);
    if (sweep->parsed()) {
      std::optional<std::filesystem::path> cfg;
      if (sweep_config) cfg = *sweep_config;
      idxqual::cmd_sweep(estimates, cfg, sweep_out, std::cout);
    }
    if (predict->parsed()) idxqual::cmd_predict(bundle, corpus, predict_out, std::cout);
  } catch (const idxqual::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
