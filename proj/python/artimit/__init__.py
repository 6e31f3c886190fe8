# Copyright 2026 The artimit Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Articulatory imitation learning: front end, synthesis, inversion and evaluation."""

from artimit._artimit import (
    FRAME_RATE,
    PARAM_NAMES,
    SAMPLE_RATE,
    Error,
    GuidedPca,
    InverseModel,
    LossSpace,
    default_ema_channels,
    dtw_distance,
    extract_source,
    frame_count,
    generate_corpus,
    imitation_loss,
    log_mel80,
    mfcc39,
    pearson_per_param,
    read_features,
    read_wav,
    run_cli,
    tract_forward,
    vtln_warp,
    wer,
    write_features,
    write_wav,
)

__all__ = [
    "FRAME_RATE",
    "PARAM_NAMES",
    "SAMPLE_RATE",
    "Error",
    "GuidedPca",
    "InverseModel",
    "LossSpace",
    "default_ema_channels",
    "dtw_distance",
    "extract_source",
    "frame_count",
    "generate_corpus",
    "imitation_loss",
    "log_mel80",
    "mfcc39",
    "pearson_per_param",
    "read_features",
    "read_wav",
    "run_cli",
    "tract_forward",
    "vtln_warp",
    "wer",
    "write_features",
    "write_wav",
]
