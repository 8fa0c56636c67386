"""t-shaped adaptive-dilation view synthesis operators."""

from ._core import (
    blend_backward,
    blend_forward,
    build_stack,
    check_blend_gradients,
    depth_metrics,
    dilation_schedule,
    image_metrics,
    make_scene,
    pan_loss,
    primitive_disparity,
    primitive_occlusion,
    read_mnrt,
    read_png,
    scale_pan,
    set_thread_count,
    shift_downscale,
    spp_blend,
    tconv_forward,
    thread_count,
    train_toy,
    write_mnrt,
    write_png,
    IoError,
)

__all__ = [
    "blend_backward",
    "blend_forward",
    "build_stack",
    "check_blend_gradients",
    "depth_metrics",
    "dilation_schedule",
    "image_metrics",
    "make_scene",
    "pan_loss",
    "primitive_disparity",
    "primitive_occlusion",
    "read_mnrt",
    "read_png",
    "scale_pan",
    "set_thread_count",
    "shift_downscale",
    "spp_blend",
    "tconv_forward",
    "thread_count",
    "train_toy",
    "write_mnrt",
    "write_png",
    "IoError",
]
