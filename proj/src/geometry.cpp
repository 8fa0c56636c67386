#include "tpan/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "tpan/parallel.hpp"

namespace tpan {

namespace {

void check_layout(const ImageField& kernels, const KernelLayout& layout) {
    if (kernels.channels != layout.channels())
        throw std::invalid_argument("kernel field channel count does not match layout");
}

}  // namespace

ImageField primitive_disparity(const ImageField& kernels, const KernelLayout& layout) {
    check_layout(kernels, layout);
    ImageField out(kernels.height, kernels.width, 1);
    parallel_rows(kernels.height, [&](int r0, int r1) {
        for (int y = r0; y < r1; ++y)
            for (int x = 0; x < kernels.width; ++x) {
                double d = 0.0;
                for (int i = 1; i <= layout.n_long; ++i)
                    d += (static_cast<double>(i) / layout.n_long) *
                         kernels.at(y, x, layout.long_begin() + i - 1);
                out.at(y, x, 0) = static_cast<float>(std::clamp(d, 0.0, 1.0));
            }
    });
    return out;
}

ImageField primitive_occlusion(const ImageField& kernels, const KernelLayout& layout) {
    check_layout(kernels, layout);
    ImageField out(kernels.height, kernels.width, 1);
    parallel_rows(kernels.height, [&](int r0, int r1) {
        for (int y = r0; y < r1; ++y)
            for (int x = 0; x < kernels.width; ++x) {
                double o = 0.0;
                for (int i = 0; i < layout.n_short; ++i)
                    o += kernels.at(y, x, layout.short_begin() + i);
                for (int i = 0; i < layout.n_up; ++i)
                    o += kernels.at(y, x, layout.up_begin() + i);
                for (int i = 0; i < layout.n_down; ++i)
                    o += kernels.at(y, x, layout.down_begin() + i);
                out.at(y, x, 0) = static_cast<float>(std::max(o, 0.0));
            }
    });
    return out;
}

double scale_pan(const BaselineTable& table, const std::string& dataset,
                 double reference_pan) {
    const auto ref = table.baselines.find(table.reference);
    if (ref == table.baselines.end())
        throw std::invalid_argument("scale_pan: reference tag missing from table");
    const auto it = table.baselines.find(dataset);
    if (it == table.baselines.end())
        throw std::invalid_argument("scale_pan: unknown dataset tag: " + dataset);
    if (ref->second <= 0.0 || it->second <= 0.0)
        throw std::invalid_argument("scale_pan: baselines must be positive");
    return reference_pan * (it->second / ref->second);
}

ImageField spp_blend(const ImageField& disp_fwd, const ImageField& disp_bwd,
                     const ImageField& amb_fwd, const ImageField& amb_bwd) {
    if (!disp_fwd.same_shape(disp_bwd) || !disp_fwd.same_spatial(amb_fwd) ||
        !disp_fwd.same_spatial(amb_bwd))
        throw std::invalid_argument("spp_blend: spatial dims must match");
    if (amb_fwd.channels != 1 || amb_bwd.channels != 1)
        throw std::invalid_argument("spp_blend: ambiguity fields must be single-channel");
    ImageField out(disp_fwd.height, disp_fwd.width, disp_fwd.channels);
    parallel_rows(out.height, [&](int r0, int r1) {
        for (int y = r0; y < r1; ++y)
            for (int x = 0; x < out.width; ++x) {
                const double a = amb_fwd.at(y, x, 0);
                const double b = amb_bwd.at(y, x, 0);
                const double m = std::max(a, b);
                const double ea = std::exp(a - m);
                const double eb = std::exp(b - m);
                const double s1 = ea / (ea + eb);
                for (int c = 0; c < out.channels; ++c)
                    out.at(y, x, c) = static_cast<float>(
                        s1 * disp_fwd.at(y, x, c) + (1.0 - s1) * disp_bwd.at(y, x, c));
            }
    });
    return out;
}

double primitive_disparity_loss(const ImageField& d_op, const ImageField& d_cp,
                                const ImageField& d_o, const ImageField& d_c) {
    if (d_o.height != 2 * d_op.height || d_o.width != 2 * d_op.width ||
        d_c.height != 2 * d_cp.height || d_c.width != 2 * d_cp.width)
        throw std::invalid_argument(
            "primitive_disparity_loss: refined maps must be 2x the primitive resolution");
    const ImageField o_half = downscale_bilinear_2x(d_o);
    const ImageField c_half = downscale_bilinear_2x(d_c);
    auto mean_abs = [](const ImageField& a, const ImageField& b) {
        if (!a.same_shape(b))
            throw std::invalid_argument("primitive_disparity_loss: shape mismatch");
        double s = 0.0;
        for (size_t i = 0; i < a.data.size(); ++i)
            s += std::abs(static_cast<double>(a.data[i]) - b.data[i]);
        return s / a.data.size();
    };
    return mean_abs(d_op, o_half) + mean_abs(d_cp, c_half);
}

}  // namespace tpan
