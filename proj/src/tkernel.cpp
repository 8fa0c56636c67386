#include "tpan/tkernel.hpp"

#include <algorithm>
#include <cmath>

#include "tpan/parallel.hpp"

namespace tpan {

double PanSpec::global_dilation() const {
    if (pan_amount == 0.0)
        throw std::invalid_argument("PanSpec: pan_amount must be nonzero");
    const int divisor = (asymmetric_dilation_rule && pan_amount < 0.0)
                            ? layout.n_short
                            : layout.n_long;
    return pan_amount / divisor;
}

std::vector<double> PanSpec::dilation_schedule() const {
    const double gd = global_dilation();
    std::vector<double> d(n_dilations);
    // (1 + (1-i)/N) * g_d, reassociated as g_d*(N+1-i)/N so the values
    // that are exactly representable (e.g. 153/32 * {3,2,1}/3) stay exact
    for (int i = 1; i <= n_dilations; ++i)
        d[i - 1] = gd * static_cast<double>(n_dilations + 1 - i) /
                   static_cast<double>(n_dilations);
    return d;
}

namespace {

// Clamped linear-interpolation footprint along one axis.
struct Tap {
    int i0, i1;
    double f;  // weight of i1
};

inline Tap make_tap(double coord, int size) {
    if (coord < 0.0) coord = 0.0;
    const double hi = size - 1;
    if (coord > hi) coord = hi;
    const int i0 = static_cast<int>(std::floor(coord));
    const int i1 = std::min(i0 + 1, size - 1);
    return {i0, i1, coord - i0};
}

inline double tap_sample(const ImageField& img, const Tap& t, int y, int c, bool horizontal, int fixed) {
    if (horizontal)
        return (1.0 - t.f) * img.at(y, t.i0, c) + t.f * img.at(y, t.i1, c);
    return (1.0 - t.f) * img.at(t.i0, fixed, c) + t.f * img.at(t.i1, fixed, c);
}

void check_shapes(const ImageField& img, const ImageField& kernels,
                  const KernelLayout& layout, double d) {
    if (!img.same_spatial(kernels))
        throw std::invalid_argument("tconv: kernel spatial dims must match image");
    if (kernels.channels != layout.channels())
        throw std::invalid_argument("tconv: kernel channel count does not match layout");
    if (d == 0.0) throw std::invalid_argument("tconv: dilation must be nonzero");
}

}  // namespace

ImageField tconv_forward(const ImageField& img, const ImageField& kernels,
                         const KernelLayout& layout, double d) {
    check_shapes(img, kernels, layout, d);
    const double ad = std::abs(d);
    ImageField out(img.height, img.width, img.channels);
    parallel_rows(img.height, [&](int r0, int r1) {
        for (int y = r0; y < r1; ++y) {
            for (int x = 0; x < img.width; ++x) {
                for (int c = 0; c < img.channels; ++c) {
                    double acc = static_cast<double>(kernels.at(y, x, 0)) * img.at(y, x, c);
                    for (int i = 1; i <= layout.n_long; ++i) {
                        const Tap t = make_tap(x + i * d, img.width);
                        acc += kernels.at(y, x, layout.long_begin() + i - 1) *
                               tap_sample(img, t, y, c, true, x);
                    }
                    for (int i = 1; i <= layout.n_short; ++i) {
                        const Tap t = make_tap(x - i * d, img.width);
                        acc += kernels.at(y, x, layout.short_begin() + i - 1) *
                               tap_sample(img, t, y, c, true, x);
                    }
                    for (int i = 1; i <= layout.n_up; ++i) {
                        const Tap t = make_tap(y - i * ad, img.height);
                        acc += kernels.at(y, x, layout.up_begin() + i - 1) *
                               tap_sample(img, t, y, c, false, x);
                    }
                    for (int i = 1; i <= layout.n_down; ++i) {
                        const Tap t = make_tap(y + i * ad, img.height);
                        acc += kernels.at(y, x, layout.down_begin() + i - 1) *
                               tap_sample(img, t, y, c, false, x);
                    }
                    out.at(y, x, c) = static_cast<float>(acc);
                }
            }
        }
    });
    return out;
}

ImageField blend_forward(const ImageField& img, const ImageField& kernels,
                         const ImageField& weights, const PanSpec& spec) {
    if (!img.same_spatial(weights))
        throw std::invalid_argument("blend_forward: weight spatial dims must match image");
    if (weights.channels != spec.n_dilations)
        throw std::invalid_argument("blend_forward: weight channels must equal n_dilations");
    const std::vector<double> schedule = spec.dilation_schedule();
    ImageField out(img.height, img.width, img.channels);
    for (int i = 0; i < spec.n_dilations; ++i) {
        const ImageField filtered = tconv_forward(img, kernels, spec.layout, schedule[i]);
        parallel_rows(img.height, [&](int r0, int r1) {
            for (int y = r0; y < r1; ++y)
                for (int x = 0; x < img.width; ++x) {
                    const float w = weights.at(y, x, i);
                    for (int c = 0; c < img.channels; ++c)
                        out.at(y, x, c) += w * filtered.at(y, x, c);
                }
        });
    }
    return out;
}

static TconvGrads tconvBackwardImpl(const ImageField& img, const ImageField& kernels,
                             const KernelLayout& layout, double d,
                             const ImageField& grad_out,
                             const ImageField* dilation_weights, int weight_ch) {
    check_shapes(img, kernels, layout, d);
    if (!grad_out.same_shape(img))
        throw std::invalid_argument("tconv_backward: grad_out must match image shape");
    const double ad = std::abs(d);
    TconvGrads g{ImageField(kernels.height, kernels.width, kernels.channels),
                 ImageField(img.height, img.width, img.channels)};

    const int parts = std::min(img.height, kPartitionCount);
    std::vector<std::vector<double>> part_acc(parts, std::vector<double>(img.size(), 0.0));

    parallel_partitions(img.height, [&](int part, int r0, int r1) {
        std::vector<double>& acc = part_acc[part];
        for (int y = r0; y < r1; ++y) {
            for (int x = 0; x < img.width; ++x) {
                double pixel_weight = 1.0;
                if (dilation_weights != nullptr)
                    pixel_weight = dilation_weights->at(y, x, weight_ch);
                // center tap
                {
                    double gk = 0.0;
                    for (int c = 0; c < img.channels; ++c) {
                        const double go = pixel_weight * grad_out.at(y, x, c);
                        gk += go * img.at(y, x, c);
                        acc[img.index(y, x, c)] += go * kernels.at(y, x, 0);
                    }
                    g.kernels.at(y, x, 0) += static_cast<float>(gk);
                }
                auto wing = [&](int chan, const Tap& t, bool horizontal) {
                    double gk = 0.0;
                    const double kv = kernels.at(y, x, chan);
                    for (int c = 0; c < img.channels; ++c) {
                        const double go = pixel_weight * grad_out.at(y, x, c);
                        gk += go * tap_sample(img, t, y, c, horizontal, x);
                        const double gi = go * kv;
                        if (horizontal) {
                            acc[img.index(y, t.i0, c)] += gi * (1.0 - t.f);
                            acc[img.index(y, t.i1, c)] += gi * t.f;
                        } else {
                            acc[img.index(t.i0, x, c)] += gi * (1.0 - t.f);
                            acc[img.index(t.i1, x, c)] += gi * t.f;
                        }
                    }
                    g.kernels.at(y, x, chan) += static_cast<float>(gk);
                };
                for (int i = 1; i <= layout.n_long; ++i)
                    wing(layout.long_begin() + i - 1, make_tap(x + i * d, img.width), true);
                for (int i = 1; i <= layout.n_short; ++i)
                    wing(layout.short_begin() + i - 1, make_tap(x - i * d, img.width), true);
                for (int i = 1; i <= layout.n_up; ++i)
                    wing(layout.up_begin() + i - 1, make_tap(y - i * ad, img.height), false);
                for (int i = 1; i <= layout.n_down; ++i)
                    wing(layout.down_begin() + i - 1, make_tap(y + i * ad, img.height), false);
            }
        }
    });

    // fixed-order merge keeps the result independent of the thread count
    std::vector<double> merged(img.size(), 0.0);
    for (int p = 0; p < parts; ++p)
        for (size_t i = 0; i < merged.size(); ++i) merged[i] += part_acc[p][i];
    for (size_t i = 0; i < merged.size(); ++i)
        g.image.data[i] = static_cast<float>(merged[i]);
    return g;
}

TconvGrads tconv_backward(const ImageField& img, const ImageField& kernels,
                          const KernelLayout& layout, double d,
                          const ImageField& grad_out) {
    return tconvBackwardImpl(img, kernels, layout, d, grad_out, nullptr, 0);
}

BlendGrads blend_backward(const ImageField& img, const ImageField& kernels,
                          const ImageField& weights, const PanSpec& spec,
                          const ImageField& grad_out) {
    if (!img.same_spatial(weights) || weights.channels != spec.n_dilations)
        throw std::invalid_argument("blend_backward: weight field shape mismatch");
    if (!grad_out.same_shape(img))
        throw std::invalid_argument("blend_backward: grad_out must match image shape");
    const std::vector<double> schedule = spec.dilation_schedule();
    BlendGrads g{ImageField(kernels.height, kernels.width, kernels.channels),
                 ImageField(weights.height, weights.width, weights.channels),
                 ImageField(img.height, img.width, img.channels)};
    for (int i = 0; i < spec.n_dilations; ++i) {
        const ImageField filtered = tconv_forward(img, kernels, spec.layout, schedule[i]);
        parallel_rows(img.height, [&](int r0, int r1) {
            for (int y = r0; y < r1; ++y)
                for (int x = 0; x < img.width; ++x) {
                    double gw = 0.0;
                    for (int c = 0; c < img.channels; ++c)
                        gw += static_cast<double>(grad_out.at(y, x, c)) * filtered.at(y, x, c);
                    g.weights.at(y, x, i) = static_cast<float>(gw);
                }
        });
        const TconvGrads gi =
            tconvBackwardImpl(img, kernels, spec.layout, schedule[i], grad_out, &weights, i);
        for (size_t k = 0; k < g.kernels.data.size(); ++k)
            g.kernels.data[k] += gi.kernels.data[k];
        for (size_t k = 0; k < g.image.data.size(); ++k)
            g.image.data[k] += gi.image.data[k];
    }
    return g;
}

}  // namespace tpan
