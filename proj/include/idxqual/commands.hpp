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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

#include "idxqual/config.hpp"

namespace idxqual {

/// Command-line overrides applied on top of a config file.
struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<int> threads;
};

/// Loads the config, applies overrides and checks referenced paths.
RunConfig resolve_config(const CommandOptions& options);

/// corpus.jsonl + vocab.tsv from the config's synth section (defaults when absent).
void cmd_synth(const CommandOptions& options, std::ostream& log);
/// metrics.csv, sweep.csv, sweep_fold<k>.csv, estimates.jsonl, summary.txt.
void cmd_run(const CommandOptions& options, std::ostream& log);
/// ablation.csv and ablation.txt.
void cmd_ablate(const CommandOptions& options, std::ostream& log);
/// Re-thresholds an estimates.jsonl dump into sweep.csv. Thresholds come from
/// the config when one is given, otherwise the default grid.
void cmd_sweep(const std::filesystem::path& estimates, const std::optional<std::filesystem::path>& config,
               const std::filesystem::path& out, std::ostream& log);
/// model.json in the output directory.
void cmd_train(const CommandOptions& options, std::ostream& log);
/// predictions.jsonl for every document of a JSON-lines corpus (labels optional).
void cmd_predict(const std::filesystem::path& bundle, const std::filesystem::path& corpus,
                 const std::filesystem::path& out, std::ostream& log);

}  // namespace idxqual
