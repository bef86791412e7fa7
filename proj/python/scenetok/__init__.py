"""Multi-view scene token sampling, ordering, statistics and scoring."""

from ._core import (
    InputError,
    compute_stats,
    format_one_decimal,
    fps,
    fps6d,
    fps_oracle,
    fuse_tokens,
    lift_6d,
    load_scene,
    multi_seed_summary,
    nearest_neighbor_map,
    normalized_score,
    order_default,
    order_objects,
    order_patch,
    order_random,
    synth_scene,
    voxel_average,
)

__all__ = [
    "InputError",
    "compute_stats",
    "format_one_decimal",
    "fps",
    "fps6d",
    "fps_oracle",
    "fuse_tokens",
    "lift_6d",
    "load_scene",
    "multi_seed_summary",
    "nearest_neighbor_map",
    "normalized_score",
    "order_default",
    "order_objects",
    "order_patch",
    "order_random",
    "synth_scene",
    "voxel_average",
]
