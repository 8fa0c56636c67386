// Scalar brute-force references used as independent oracles. Everything
// here is plain double loops written from the definitions; none of it
// calls into the operator implementations it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "tpan/image.hpp"
#include "tpan/tkernel.hpp"

namespace ref {

using tpan::ImageField;

inline double lerp_clamped(const std::vector<double>& v, double x) {
    const double hi = static_cast<double>(v.size()) - 1.0;
    x = std::clamp(x, 0.0, hi);
    const size_t i0 = static_cast<size_t>(std::floor(x));
    const size_t i1 = std::min(i0 + 1, v.size() - 1);
    const double f = x - static_cast<double>(i0);
    return (1.0 - f) * v[i0] + f * v[i1];
}

inline std::vector<double> row_of(const ImageField& img, int y, int c) {
    std::vector<double> r(img.width);
    for (int x = 0; x < img.width; ++x) r[x] = img.at(y, x, c);
    return r;
}

inline std::vector<double> col_of(const ImageField& img, int x, int c) {
    std::vector<double> r(img.height);
    for (int y = 0; y < img.height; ++y) r[y] = img.at(y, x, c);
    return r;
}

// Every tap looped explicitly; layout per the kernel field contract.
inline double blend_forward_at(const ImageField& img, const ImageField& kernels,
                               const ImageField& weights, const tpan::PanSpec& spec,
                               int y, int x, int c) {
    const tpan::KernelLayout& L = spec.layout;
    double divisor = L.n_long;
    if (spec.asymmetric_dilation_rule && spec.pan_amount < 0) divisor = L.n_short;
    const double gd = spec.pan_amount / divisor;
    const std::vector<double> row = row_of(img, y, c);
    const std::vector<double> col = col_of(img, x, c);
    double out = 0.0;
    for (int i = 1; i <= spec.n_dilations; ++i) {
        const double d = (1.0 + (1.0 - i) / spec.n_dilations) * gd;
        double acc = static_cast<double>(kernels.at(y, x, 0)) * img.at(y, x, c);
        for (int t = 1; t <= L.n_long; ++t)
            acc += kernels.at(y, x, L.long_begin() + t - 1) * lerp_clamped(row, x + t * d);
        for (int t = 1; t <= L.n_short; ++t)
            acc += kernels.at(y, x, L.short_begin() + t - 1) * lerp_clamped(row, x - t * d);
        for (int t = 1; t <= L.n_up; ++t)
            acc += kernels.at(y, x, L.up_begin() + t - 1) * lerp_clamped(col, y - t * std::abs(d));
        for (int t = 1; t <= L.n_down; ++t)
            acc += kernels.at(y, x, L.down_begin() + t - 1) * lerp_clamped(col, y + t * std::abs(d));
        out += weights.at(y, x, i - 1) * acc;
    }
    return out;
}

// Direct definition of one shift-downscale output value.
inline double shift_downscale_at(const ImageField& img, double stride, int y,
                                 int x, int c) {
    const double sy = 2.0 * y + 0.5;
    const double sx = std::clamp(2.0 * x + 0.5 + stride, 0.0,
                                 static_cast<double>(img.width - 1));
    const double cy = std::clamp(sy, 0.0, static_cast<double>(img.height - 1));
    const int x0 = static_cast<int>(std::floor(sx));
    const int y0 = static_cast<int>(std::floor(cy));
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = sx - x0, fy = cy - y0;
    return (1 - fy) * ((1 - fx) * img.at(y0, x0, c) + fx * img.at(y0, x1, c)) +
           fy * ((1 - fx) * img.at(y1, x0, c) + fx * img.at(y1, x1, c));
}

// Two-step oracle: shift the full-resolution image with linear
// interpolation, then 2x bilinear downscale. Agrees with the one-step
// operator wherever no border clamp lands inside a sampling footprint.
inline ImageField two_step_shift_downscale(const ImageField& img, double stride) {
    ImageField shifted(img.height, img.width, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int c = 0; c < img.channels; ++c) {
            const std::vector<double> row = row_of(img, y, c);
            for (int x = 0; x < img.width; ++x)
                shifted.at(y, x, c) = static_cast<float>(lerp_clamped(row, x + stride));
        }
    ImageField out(img.height / 2, img.width / 2, img.channels);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            for (int c = 0; c < out.channels; ++c) {
                double s = 0.0;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) s += shifted.at(2 * y + dy, 2 * x + dx, c);
                out.at(y, x, c) = static_cast<float>(s / 4.0);
            }
    return out;
}

struct DepthRef {
    double abs_rel, sq_rel, rms, log_rms, a1, a2, a3;
};

inline DepthRef depth_metrics(const std::vector<double>& p,
                              const std::vector<double>& g) {
    DepthRef r{0, 0, 0, 0, 0, 0, 0};
    const double n = static_cast<double>(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
        r.abs_rel += std::abs(p[i] - g[i]) / g[i];
        r.sq_rel += (p[i] - g[i]) * (p[i] - g[i]) / g[i];
        r.rms += (p[i] - g[i]) * (p[i] - g[i]);
        r.log_rms += std::pow(std::log(p[i]) - std::log(g[i]), 2);
        const double ratio = std::max(p[i] / g[i], g[i] / p[i]);
        if (ratio < 1.25) r.a1 += 1;
        if (ratio < 1.5625) r.a2 += 1;
        if (ratio < 1.953125) r.a3 += 1;
    }
    r.abs_rel /= n;
    r.sq_rel /= n;
    r.rms = std::sqrt(r.rms / n);
    r.log_rms = std::sqrt(r.log_rms / n);
    r.a1 /= n;
    r.a2 /= n;
    r.a3 /= n;
    return r;
}

inline ImageField random_field(int h, int w, int c, std::mt19937& rng,
                               float lo = 0.0f, float hi = 1.0f) {
    ImageField f(h, w, c);
    std::uniform_real_distribution<float> uni(lo, hi);
    for (float& v : f.data) v = uni(rng);
    return f;
}

inline void normalize_channels(ImageField& f) {
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) {
            double s = 0.0;
            for (int c = 0; c < f.channels; ++c) s += f.at(y, x, c);
            for (int c = 0; c < f.channels; ++c)
                f.at(y, x, c) = static_cast<float>(f.at(y, x, c) / s);
        }
}

}  // namespace ref
