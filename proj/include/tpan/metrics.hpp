#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tpan/image.hpp"

namespace tpan {

/// Maps an image to a list of feature fields (one per level). Stands in
/// for a pretrained perceptual network; tests use the average-pool
/// pyramid below.
using FeatureExtractor = std::function<std::vector<ImageField>(const ImageField&)>;

/// Deterministic 3-level 2x average-pool pyramid.
FeatureExtractor avg_pool_extractor(int levels = 3);

struct LossReport {
    double l1_hr = 0.0;
    double l1_lr = 0.0;
    std::optional<double> feature_term;
    double total = 0.0;
    double alpha_p = 0.01;
};

/// Reconstruction loss: mean-l1 at full and half resolution plus an
/// optional feature-space term weighted by alpha_p. The half-resolution
/// ground truth is the bilinear 2x downscale of `gt`.
LossReport pan_loss(const ImageField& gt, const ImageField& out_hr,
                    const ImageField& out_lr,
                    const FeatureExtractor& features = nullptr,
                    double alpha_p = 0.01);

struct ImageMetrics {
    double rmse = 0.0;
    double psnr = 0.0;  // +infinity when rmse == 0
    double ssim = 0.0;
};

/// RMSE / PSNR on a 0-255 value scale; SSIM with an 11x11 Gaussian
/// window (sigma 1.5, K1=0.01, K2=0.03, L=255) averaged over valid
/// window centers and channels.
ImageMetrics image_metrics(const ImageField& pred, const ImageField& gt);

struct DepthMetrics {
    double abs_rel = 0.0;
    double sq_rel = 0.0;
    double rms = 0.0;
    double log_rms = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
};

/// Standard masked aggregate depth errors; thresholds a^k use strict
/// max(p/g, g/p) < 1.25^k. Rejects empty masks and nonpositive values
/// on the mask.
DepthMetrics depth_metrics(const ImageField& pred, const ImageField& gt,
                           const ImageField& mask);

}  // namespace tpan
