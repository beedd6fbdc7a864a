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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "idxqual/experiment.hpp"
#include "idxqual/synth.hpp"

namespace idxqual {

/// Parsed run configuration. Relative paths are resolved against the
/// directory of the config file.
struct RunConfig {
  std::optional<std::filesystem::path> corpus;
  std::optional<std::filesystem::path> vocabulary;
  /// Used when no corpus path is given.
  std::optional<SynthConfig> synth;
  std::optional<std::filesystem::path> output_dir;
  ExperimentConfig experiment;
  GroupMask ablation_groups = GroupMask::all();
};

/// Strict parse: unknown keys, wrong types and out-of-range values raise
/// ConfigError. "seed" is required.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Checks that every referenced path exists and that a corpus source is set.
void validate_paths(const RunConfig& config);

/// Canonical JSON form, accepted back by parse_run_config.
std::string run_config_json(const RunConfig& config);

/// Synth section of a config document. A top-level "seed" is used when the
/// section has none.
SynthConfig parse_synth_config(std::string_view json_text);

LearnerSpec parse_learner_spec(std::string_view json_text);
std::string learner_spec_json(const LearnerSpec& spec);

/// Corpus named by the config, or a generated one.
Corpus load_run_corpus(const RunConfig& config);

}  // namespace idxqual
