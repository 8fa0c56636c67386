#include "tpan/image.hpp"

#include <algorithm>
#include <cmath>

#include "tpan/parallel.hpp"

namespace tpan {

namespace {

inline double clamp_coord(double v, double hi) {
    return v < 0.0 ? 0.0 : (v > hi ? hi : v);
}

}  // namespace

float sample_linear_h(const ImageField& img, double x, int y, int c) {
    x = clamp_coord(x, img.width - 1);
    const int x0 = static_cast<int>(std::floor(x));
    const int x1 = std::min(x0 + 1, img.width - 1);
    const double f = x - x0;
    const double v0 = img.at(y, x0, c);
    const double v1 = img.at(y, x1, c);
    return static_cast<float>((1.0 - f) * v0 + f * v1);
}

float sample_linear_v(const ImageField& img, int x, double y, int c) {
    y = clamp_coord(y, img.height - 1);
    const int y0 = static_cast<int>(std::floor(y));
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double f = y - y0;
    const double v0 = img.at(y0, x, c);
    const double v1 = img.at(y1, x, c);
    return static_cast<float>((1.0 - f) * v0 + f * v1);
}

float sample_bilinear(const ImageField& img, double y, double x, int c) {
    x = clamp_coord(x, img.width - 1);
    y = clamp_coord(y, img.height - 1);
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = (1.0 - fx) * img.at(y0, x0, c) + fx * img.at(y0, x1, c);
    const double bot = (1.0 - fx) * img.at(y1, x0, c) + fx * img.at(y1, x1, c);
    return static_cast<float>((1.0 - fy) * top + fy * bot);
}

ImageField shift_downscale(const ImageField& img, double stride) {
    if (img.height % 2 != 0 || img.width % 2 != 0)
        throw std::invalid_argument("shift_downscale: dimensions must be even");
    ImageField out(img.height / 2, img.width / 2, img.channels);
    parallel_rows(out.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < out.width; ++x)
                for (int c = 0; c < out.channels; ++c)
                    out.at(y, x, c) =
                        sample_bilinear(img, 2.0 * y + 0.5, 2.0 * x + 0.5 + stride, c);
    });
    return out;
}

ImageField downscale_bilinear_2x(const ImageField& img) {
    return shift_downscale(img, 0.0);
}

ImageField upscale_nearest_2x(const ImageField& img) {
    ImageField out(img.height * 2, img.width * 2, img.channels);
    parallel_rows(out.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < out.width; ++x)
                for (int c = 0; c < out.channels; ++c)
                    out.at(y, x, c) = img.at(y / 2, x / 2, c);
    });
    return out;
}

ImageField upscale_bilinear_2x(const ImageField& img) {
    ImageField out(img.height * 2, img.width * 2, img.channels);
    parallel_rows(out.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < out.width; ++x)
                for (int c = 0; c < out.channels; ++c)
                    out.at(y, x, c) = sample_bilinear(img, (y - 0.5) / 2.0,
                                                      (x - 0.5) / 2.0, c);
    });
    return out;
}

ImageField mirror_h(const ImageField& img) {
    ImageField out(img.height, img.width, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c)
                out.at(y, x, c) = img.at(y, img.width - 1 - x, c);
    return out;
}

}  // namespace tpan
