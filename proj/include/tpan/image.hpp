#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tpan {

/// Dense H x W x C grid of 32-bit reals in row-major (y, x, c) order.
/// Carrier type for images, kernel parameter maps, disparity maps and
/// gradient buffers.
struct ImageField {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<float> data;

    ImageField() = default;
    ImageField(int h, int w, int c, float fill = 0.0f)
        : height(h), width(w), channels(c),
          data(static_cast<size_t>(h) * w * c, fill) {
        if (h <= 0 || w <= 0 || c <= 0)
            throw std::invalid_argument("ImageField: dimensions must be positive");
    }

    size_t index(int y, int x, int c) const {
        return (static_cast<size_t>(y) * width + x) * channels + c;
    }
    float& at(int y, int x, int c) { return data[index(y, x, c)]; }
    float at(int y, int x, int c) const { return data[index(y, x, c)]; }

    size_t size() const { return data.size(); }
    bool same_shape(const ImageField& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
    bool same_spatial(const ImageField& o) const {
        return height == o.height && width == o.width;
    }
};

/// Linear interpolation along a row at fractional x; coordinates outside
/// [0, width-1] clamp to the border (replicate padding). Exact on integer x.
float sample_linear_h(const ImageField& img, double x, int y, int c);

/// Vertical twin of sample_linear_h.
float sample_linear_v(const ImageField& img, int x, double y, int c);

/// Bilinear sample at fractional (y, x) with replicate border clamp.
float sample_bilinear(const ImageField& img, double y, double x, int c);

/// Horizontal shift by `stride` source pixels followed by 2x bilinear
/// downscale. Output pixel (y', x', c) samples the input at
/// (2y' + 0.5, 2x' + 0.5 + stride). Rejects odd dimensions.
ImageField shift_downscale(const ImageField& img, double stride);

/// 2x downscale on the pixel-center grid; identical to shift_downscale
/// with stride 0 (an unbiased 2x2 average away from borders).
ImageField downscale_bilinear_2x(const ImageField& img);

/// Each source pixel replicated into a 2x2 block.
ImageField upscale_nearest_2x(const ImageField& img);

/// 2x bilinear upscale on the pixel-center grid with border clamp.
ImageField upscale_bilinear_2x(const ImageField& img);

/// Horizontal mirror (x -> width-1-x).
ImageField mirror_h(const ImageField& img);

}  // namespace tpan
