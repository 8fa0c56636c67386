#pragma once

#include <vector>

#include "tpan/image.hpp"

namespace tpan {

/// Per-pixel channel layout of a t-kernel parameter field. Channel 0 is
/// the center tap; then the short wing opposite the pan, the long wing in
/// the pan direction, the upper wing and the bottom wing, each ordered by
/// increasing offset index. Defaults give the 81-channel layout.
struct KernelLayout {
    int n_short = 16;
    int n_long = 32;
    int n_up = 16;
    int n_down = 16;

    int channels() const { return 1 + n_short + n_long + n_up + n_down; }
    int short_begin() const { return 1; }
    int long_begin() const { return 1 + n_short; }
    int up_begin() const { return 1 + n_short + n_long; }
    int down_begin() const { return 1 + n_short + n_long + n_up; }
};

/// Pan geometry: signed pan amount in pixels (positive = rightward) plus
/// the wing lengths and the number of blended dilations N.
struct PanSpec {
    double pan_amount = 0.0;
    KernelLayout layout;
    int n_dilations = 3;
    /// When true, a leftward pan divides by the short-wing length instead
    /// of the long-wing length (the asymmetric reading of the dilation
    /// rule); default divides by the long wing for both directions.
    bool asymmetric_dilation_rule = false;

    /// Signed tap spacing derived from the pan amount.
    double global_dilation() const;
    /// [d_1..d_N] with d_i = (1 + (1-i)/N) * g_d; strictly decreasing in
    /// magnitude, all nonzero. Rejects pan_amount == 0.
    std::vector<double> dilation_schedule() const;
};

/// Single t-shaped convolution at signed dilation d. Long wing samples at
/// x + i*d, short wing at x - i*d, vertical wings at y -/+ i*|d|, all via
/// clamped 1D linear interpolation. Kernel spatial dims must match img.
ImageField tconv_forward(const ImageField& img, const ImageField& kernels,
                         const KernelLayout& layout, double d);

/// Locally blended synthesis: sum over the dilation schedule of
/// w_i(p) * tconv_forward(img, kernels, d_i)(p).
ImageField blend_forward(const ImageField& img, const ImageField& kernels,
                         const ImageField& weights, const PanSpec& spec);

struct TconvGrads {
    ImageField kernels;
    ImageField image;
};

/// Exact adjoint of tconv_forward. grad_kernels gathers
/// grad_out * sampled value; grad_img scatter-adds through the same
/// interpolation weights, accumulated per output-row partition and merged
/// in fixed order for bit-reproducibility.
TconvGrads tconv_backward(const ImageField& img, const ImageField& kernels,
                          const KernelLayout& layout, double d,
                          const ImageField& grad_out);

struct BlendGrads {
    ImageField kernels;
    ImageField weights;
    ImageField image;
};

/// Adjoint of blend_forward over all three inputs.
BlendGrads blend_backward(const ImageField& img, const ImageField& kernels,
                          const ImageField& weights, const PanSpec& spec,
                          const ImageField& grad_out);

}  // namespace tpan
