# Copyright (C) 2026 The sharpv Authors
# SPDX-License-Identifier: Apache-2.0
"""Training-free visual token and KV-cache pruning for video decoders."""

from ._sharpv import (
    ConfigError,
    DecoderConfig,
    InvariantError,
    IoError,
    PruneMode,
    ShapeError,
    TensorIoError,
    ValueError,
    cosine_sim,
    degradation_profile,
    discard_decision,
    dissim,
    frame_thresholds,
    gen_synthetic_video,
    l2_normalize,
    prune_video,
    read_tensor,
    run,
    select_topk,
    spatial_importance,
    temporal_importance,
    write_tensor,
)

__all__ = [
    "ConfigError",
    "DecoderConfig",
    "InvariantError",
    "IoError",
    "PruneMode",
    "ShapeError",
    "TensorIoError",
    "cosine_sim",
    "degradation_profile",
    "discard_decision",
    "dissim",
    "frame_thresholds",
    "gen_synthetic_video",
    "l2_normalize",
    "prune_video",
    "read_tensor",
    "run",
    "select_topk",
    "spatial_importance",
    "temporal_importance",
    "write_tensor",
]
