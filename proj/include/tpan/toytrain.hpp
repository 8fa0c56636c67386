#pragma once

#include <string>
#include <vector>

#include "tpan/metrics.hpp"
#include "tpan/tkernel.hpp"

namespace tpan {

/// Synthetic layered scene with exact disparity and occlusion ground
/// truth. The panned view is rendered by back-to-front compositing of
/// layers, each shifted by its own disparity in the pan direction, so it
/// serves as an independent oracle for synthesis and extraction.
struct SceneOracle {
    ImageField center;     // H x W x 3
    ImageField panned;     // H x W x 3
    ImageField disparity;  // H x W x 1, normalized to [0,1] by |pan|
    ImageField occlusion;  // H x W x 1, 1 where the panned pixel's source
                           // is covered (or out of frame) in the center view
    double pan_amount = 0.0;
};

enum class SceneKind { checker, noise, bars };
SceneKind scene_kind_from_string(const std::string& s);

/// Layered scene builder. `disparities` lists per-layer disparities in
/// pixels, strictly decreasing front-to-back, all < |pan_amount|. The
/// front layers occupy deterministic rectangles; the back layer fills
/// the frame.
SceneOracle make_scene(SceneKind kind, int height, int width,
                       const std::vector<double>& disparities,
                       double pan_amount, unsigned seed);

struct TrainOptions {
    int iters = 500;
    double step_size = 0.5;
    unsigned seed = 0;
    bool adaptive_moments = false;  // beta 0.5 / 0.999
};

struct TrainState {
    ImageField kernel_logits;
    ImageField blend_logits;
    int step = 0;
    std::vector<double> loss_history;     // per-iteration mean-l1
    std::vector<double> best_so_far;      // nonincreasing summary
    // first/second moment buffers, allocated when adaptive moments are on
    ImageField mk, vk, mw, vw;

    ImageField kernels(const KernelLayout& layout) const;  // softmax over 81 ch
    ImageField weights() const;                            // softmax over N ch
};

/// Optimizes raw per-pixel kernel and blend logits by gradient descent on
/// the mean-l1 reconstruction error against the oracle's panned view.
/// Logits start at zero (uniform kernels). Throws if the loss turns
/// non-finite.
TrainState train_toy(const SceneOracle& scene, const PanSpec& spec,
                     const TrainOptions& opts);

struct ToyEvalReport {
    ImageMetrics reconstruction;  // 0-255 scale
    DepthMetrics depth;           // masked to valid, non-occluded pixels
    ImageField reconstructed;
    ImageField disparity;
};

ToyEvalReport eval_toy(const TrainState& state, const SceneOracle& scene,
                       const PanSpec& spec);

/// Per-pixel softmax across channels (stabilized).
ImageField softmax_field(const ImageField& logits);

/// Jacobian-vector product of softmax_field: given probabilities p and
/// upstream grad g, returns p * (g - <g, p>) per pixel.
ImageField softmax_backward(const ImageField& probs, const ImageField& grad);

}  // namespace tpan
