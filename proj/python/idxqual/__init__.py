# Copyright 2026 The idxqual Authors. All Rights Reserved.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#     http://www.apache.org/licenses/LICENSE-2.0
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Quality estimation for automatic subject indexing."""

from ._core import (
    Bundle,
    BundleError,
    ConfigError,
    Error,
    InvalidArgument,
    ParseError,
    ablate,
    default_thresholds,
    doc_precision,
    doc_recall,
    mse,
    parse_mask,
    pearson,
    predict,
    run,
    sweep,
    synth,
    threshold_sweep,
    tokenize,
    train,
)

__all__ = [
    "Bundle",
    "BundleError",
    "ConfigError",
    "Error",
    "InvalidArgument",
    "ParseError",
    "ablate",
    "default_thresholds",
    "doc_precision",
    "doc_recall",
    "mse",
    "parse_mask",
    "pearson",
    "predict",
    "run",
    "sweep",
    "synth",
    "threshold_sweep",
    "tokenize",
    "train",
]
