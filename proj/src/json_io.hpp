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

// JSON conversions shared by config and bundle code.
#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include "idxqual/config.hpp"
#include "idxqual/error.hpp"
#include "json.hpp"

namespace idxqual::json_io {

using Json = nlohmann::ordered_json;

void require_object(const Json& j, std::string_view where);
void reject_unknown(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view where);

Json to_json(const LearnerSpec& spec);
LearnerSpec learner_from_json(const Json& j, std::string_view where);

Json to_json(const SynthConfig& config);
SynthConfig synth_from_json(const Json& j, std::optional<std::uint64_t> default_seed);

Json to_json(const RunConfig& config);
RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base_dir);

}  // namespace idxqual::json_io
