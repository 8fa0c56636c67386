#include "tpan/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace tpan {

double GradCheckReport::worst() const {
    return std::max({max_err_kernels, max_err_weights, max_err_image});
}

namespace {

// Scalar forward for one output pixel, all in double. Independent of the
// vectorized operator path; only shares the sampling convention.
void fd_pixel_forward(const ImageField& img, const ImageField& kernels,
                      const ImageField& weights, const PanSpec& spec,
                      const std::vector<double>& schedule, int y, int x,
                      double* out) {
    const KernelLayout& L = spec.layout;
    auto lerp_h = [&](double cx, int c) {
        cx = std::clamp(cx, 0.0, static_cast<double>(img.width - 1));
        const int x0 = static_cast<int>(std::floor(cx));
        const int x1 = std::min(x0 + 1, img.width - 1);
        const double f = cx - x0;
        return (1.0 - f) * img.at(y, x0, c) + f * img.at(y, x1, c);
    };
    auto lerp_v = [&](double cy, int c) {
        cy = std::clamp(cy, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(std::floor(cy));
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double f = cy - y0;
        return (1.0 - f) * img.at(y0, x, c) + f * img.at(y1, x, c);
    };
    for (int c = 0; c < img.channels; ++c) out[c] = 0.0;
    for (int i = 0; i < spec.n_dilations; ++i) {
        const double d = schedule[i];
        const double ad = std::abs(d);
        const double w = weights.at(y, x, i);
        for (int c = 0; c < img.channels; ++c) {
            double acc = static_cast<double>(kernels.at(y, x, 0)) * img.at(y, x, c);
            for (int t = 1; t <= L.n_long; ++t)
                acc += kernels.at(y, x, L.long_begin() + t - 1) * lerp_h(x + t * d, c);
            for (int t = 1; t <= L.n_short; ++t)
                acc += kernels.at(y, x, L.short_begin() + t - 1) * lerp_h(x - t * d, c);
            for (int t = 1; t <= L.n_up; ++t)
                acc += kernels.at(y, x, L.up_begin() + t - 1) * lerp_v(y - t * ad, c);
            for (int t = 1; t <= L.n_down; ++t)
                acc += kernels.at(y, x, L.down_begin() + t - 1) * lerp_v(y + t * ad, c);
            out[c] += w * acc;
        }
    }
}

double pixel_loss(const ImageField& img, const ImageField& kernels,
                  const ImageField& weights, const PanSpec& spec,
                  const std::vector<double>& schedule, int y, int x) {
    double out[16];
    fd_pixel_forward(img, kernels, weights, spec, schedule, y, x, out);
    double l = 0.0;
    for (int c = 0; c < img.channels; ++c) l += out[c] * out[c];
    return l;
}

double rel_err(double a, double f) {
    return std::abs(a - f) / std::max({std::abs(a), std::abs(f), 1e-2});
}

}  // namespace

GradCheckReport check_blend_gradients(int height, int width, unsigned seed,
                                      const PanSpec& spec, int max_image_entries) {
    if (height < 4 || width < 4)
        throw std::invalid_argument("check_blend_gradients: need at least a 4x4 instance");
    const int channels = 3;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> uni(0.0f, 1.0f);

    ImageField img(height, width, channels);
    for (float& v : img.data) v = uni(rng);
    ImageField kernels(height, width, spec.layout.channels());
    for (float& v : kernels.data) v = uni(rng);
    ImageField weights(height, width, spec.n_dilations);
    for (float& v : weights.data) v = uni(rng);
    // per-pixel simplex normalization keeps outputs in a sane range
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double sk = 0.0, sw = 0.0;
            for (int c = 0; c < kernels.channels; ++c) sk += kernels.at(y, x, c);
            for (int c = 0; c < kernels.channels; ++c)
                kernels.at(y, x, c) = static_cast<float>(kernels.at(y, x, c) / sk);
            for (int c = 0; c < weights.channels; ++c) sw += weights.at(y, x, c);
            for (int c = 0; c < weights.channels; ++c)
                weights.at(y, x, c) = static_cast<float>(weights.at(y, x, c) / sw);
        }

    const std::vector<double> schedule = spec.dilation_schedule();
    const ImageField out = blend_forward(img, kernels, weights, spec);
    ImageField grad_out(height, width, channels);
    for (size_t i = 0; i < out.data.size(); ++i)
        grad_out.data[i] = 2.0f * out.data[i];
    const BlendGrads analytic = blend_backward(img, kernels, weights, spec, grad_out);

    GradCheckReport rep;
    const double h = 1e-3;

    // kernel and weight entries: the loss only changes at their own pixel
    auto check_field = [&](ImageField& field, const ImageField& grad, double& worst) {
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                for (int c = 0; c < field.channels; ++c) {
                    const float orig = field.at(y, x, c);
                    const float vp = static_cast<float>(orig + h);
                    const float vm = static_cast<float>(orig - h);
                    field.at(y, x, c) = vp;
                    const double lp = pixel_loss(img, kernels, weights, spec, schedule, y, x);
                    field.at(y, x, c) = vm;
                    const double lm = pixel_loss(img, kernels, weights, spec, schedule, y, x);
                    field.at(y, x, c) = orig;
                    const double fd =
                        (lp - lm) / (static_cast<double>(vp) - static_cast<double>(vm));
                    worst = std::max(worst, rel_err(grad.at(y, x, c), fd));
                }
    };
    check_field(kernels, analytic.kernels, rep.max_err_kernels);
    check_field(weights, analytic.weights, rep.max_err_weights);

    // image entries: perturbing (y, x, c) only reaches outputs in row y and
    // column x, so the loss delta is summed over that cross
    std::vector<size_t> entries(img.data.size());
    std::iota(entries.begin(), entries.end(), size_t{0});
    if (static_cast<int>(entries.size()) > max_image_entries) {
        std::shuffle(entries.begin(), entries.end(), rng);
        entries.resize(max_image_entries);
    }
    auto cross_loss = [&](int y, int x) {
        double l = 0.0;
        for (int qx = 0; qx < width; ++qx)
            l += pixel_loss(img, kernels, weights, spec, schedule, y, qx);
        for (int qy = 0; qy < height; ++qy)
            if (qy != y) l += pixel_loss(img, kernels, weights, spec, schedule, qy, x);
        return l;
    };
    for (size_t idx : entries) {
        const int c = static_cast<int>(idx % channels);
        const int x = static_cast<int>((idx / channels) % width);
        const int y = static_cast<int>(idx / channels / width);
        const float orig = img.data[idx];
        const float vp = static_cast<float>(orig + h);
        const float vm = static_cast<float>(orig - h);
        img.data[idx] = vp;
        const double lp = cross_loss(y, x);
        img.data[idx] = vm;
        const double lm = cross_loss(y, x);
        img.data[idx] = orig;
        const double fd = (lp - lm) / (static_cast<double>(vp) - static_cast<double>(vm));
        rep.max_err_image = std::max(rep.max_err_image, rel_err(analytic.image.data[idx], fd));
    }
    return rep;
}

}  // namespace tpan
