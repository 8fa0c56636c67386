#include "tpan/toytrain.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tpan/geometry.hpp"
#include "tpan/parallel.hpp"

namespace tpan {

SceneKind scene_kind_from_string(const std::string& s) {
    if (s == "checker") return SceneKind::checker;
    if (s == "noise") return SceneKind::noise;
    if (s == "bars") return SceneKind::bars;
    throw std::invalid_argument("unknown scene kind: " + s);
}

namespace {

struct Layer {
    ImageField texture;  // H x W x 3
    ImageField mask;     // H x W x 1, 0/1
    double disparity;    // pixels
};

ImageField layer_texture(SceneKind kind, int h, int w, int layer_idx,
                         std::mt19937& rng) {
    ImageField tex(h, w, 3);
    std::uniform_real_distribution<float> uni(0.0f, 1.0f);
    float pal[2][3];
    for (auto& p : pal)
        for (float& v : p) v = uni(rng);
    switch (kind) {
        case SceneKind::checker: {
            const int cell = 3 + 2 * layer_idx;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const int sel = ((y / cell) + (x / cell)) % 2;
                    for (int c = 0; c < 3; ++c) tex.at(y, x, c) = pal[sel][c];
                }
            break;
        }
        case SceneKind::noise: {
            // band-limited value noise (random coarse grid, bilinearly
            // upsampled) so matching costs vary smoothly with shift, plus a
            // small white component so no patch is ever truly flat
            const int grid = 8;
            const float wamp = 0.1f;
            const int gh = h / grid + 2, gw = w / grid + 2;
            std::vector<float> coarse(static_cast<size_t>(gh) * gw * 3);
            for (float& v : coarse) v = uni(rng);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double sy = static_cast<double>(y) / grid;
                    const double sx = static_cast<double>(x) / grid;
                    const int y0 = static_cast<int>(sy), x0 = static_cast<int>(sx);
                    const double fy = sy - y0, fx = sx - x0;
                    for (int c = 0; c < 3; ++c) {
                        auto g = [&](int yy, int xx) {
                            return coarse[(static_cast<size_t>(yy) * gw + xx) * 3 + c];
                        };
                        tex.at(y, x, c) = static_cast<float>(
                            (1.0f - wamp) * ((1 - fy) * ((1 - fx) * g(y0, x0) + fx * g(y0, x0 + 1)) +
                                   fy * ((1 - fx) * g(y0 + 1, x0) + fx * g(y0 + 1, x0 + 1))));
                    }
                }
            for (float& v : tex.data) v += wamp * uni(rng);
            break;
        }
        case SceneKind::bars: {
            const int bar = 4 + layer_idx;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const int sel = (x / bar) % 2;
                    for (int c = 0; c < 3; ++c) tex.at(y, x, c) = pal[sel][c];
                }
            break;
        }
    }
    return tex;
}

}  // namespace

SceneOracle make_scene(SceneKind kind, int height, int width,
                       const std::vector<double>& disparities,
                       double pan_amount, unsigned seed) {
    if (height % 2 != 0 || width % 2 != 0)
        throw std::invalid_argument("make_scene: dimensions must be even");
    if (disparities.empty())
        throw std::invalid_argument("make_scene: need at least one layer");
    for (size_t k = 0; k + 1 < disparities.size(); ++k)
        if (disparities[k] <= disparities[k + 1])
            throw std::invalid_argument(
                "make_scene: disparities must be strictly decreasing front-to-back");
    for (double d : disparities)
        if (std::abs(d) >= std::abs(pan_amount))
            throw std::invalid_argument("make_scene: disparity exceeds pan magnitude");

    std::mt19937 rng(seed);
    const int n_layers = static_cast<int>(disparities.size());
    std::vector<Layer> layers;
    layers.reserve(n_layers);
    for (int k = 0; k < n_layers; ++k) {
        Layer layer{layer_texture(kind, height, width, k, rng),
                    ImageField(height, width, 1, 0.0f), disparities[k]};
        if (k == n_layers - 1) {
            std::fill(layer.mask.data.begin(), layer.mask.data.end(), 1.0f);
        } else {
            // deterministic foreground rectangle per layer
            const int y0 = height / 4, y1 = 3 * height / 4;
            const int x0 = width / 8 + k * width / 6;
            const int x1 = std::min(x0 + width / 4, width);
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) layer.mask.at(y, x, 0) = 1.0f;
        }
        layers.push_back(std::move(layer));
    }

    SceneOracle scene;
    scene.pan_amount = pan_amount;
    scene.center = ImageField(height, width, 3);
    scene.panned = ImageField(height, width, 3);
    scene.disparity = ImageField(height, width, 1);
    scene.occlusion = ImageField(height, width, 1);

    // visible-layer index per center pixel (front layer wins)
    std::vector<int> center_layer(static_cast<size_t>(height) * width, n_layers - 1);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            for (int k = 0; k < n_layers; ++k)
                if (layers[k].mask.at(y, x, 0) > 0.5f) {
                    center_layer[static_cast<size_t>(y) * width + x] = k;
                    break;
                }
            const int k = center_layer[static_cast<size_t>(y) * width + x];
            for (int c = 0; c < 3; ++c)
                scene.center.at(y, x, c) = layers[k].texture.at(y, x, c);
        }

    const double dir = pan_amount >= 0.0 ? 1.0 : -1.0;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            int visible = n_layers - 1;
            for (int k = 0; k < n_layers; ++k) {
                const double sx = x + dir * layers[k].disparity;
                const int mx = std::clamp(static_cast<int>(std::lround(sx)), 0, width - 1);
                if (layers[k].mask.at(y, mx, 0) > 0.5f) {
                    visible = k;
                    break;
                }
            }
            const double sx = x + dir * layers[visible].disparity;
            for (int c = 0; c < 3; ++c)
                scene.panned.at(y, x, c) =
                    sample_linear_h(layers[visible].texture, sx, y, c);
            scene.disparity.at(y, x, 0) = static_cast<float>(
                layers[visible].disparity / std::abs(pan_amount));
            // occluded iff the source pixel is covered by a nearer layer in
            // the center view
            const int mx = std::clamp(static_cast<int>(std::lround(sx)), 0, width - 1);
            if (center_layer[static_cast<size_t>(y) * width + mx] < visible)
                scene.occlusion.at(y, x, 0) = 1.0f;
        }
    return scene;
}

ImageField softmax_field(const ImageField& logits) {
    ImageField out(logits.height, logits.width, logits.channels);
    parallel_rows(logits.height, [&](int r0, int r1) {
        for (int y = r0; y < r1; ++y)
            for (int x = 0; x < logits.width; ++x) {
                double m = logits.at(y, x, 0);
                for (int c = 1; c < logits.channels; ++c)
                    m = std::max(m, static_cast<double>(logits.at(y, x, c)));
                double sum = 0.0;
                for (int c = 0; c < logits.channels; ++c)
                    sum += std::exp(static_cast<double>(logits.at(y, x, c)) - m);
                for (int c = 0; c < logits.channels; ++c)
                    out.at(y, x, c) = static_cast<float>(
                        std::exp(static_cast<double>(logits.at(y, x, c)) - m) / sum);
            }
    });
    return out;
}

ImageField softmax_backward(const ImageField& probs, const ImageField& grad) {
    if (!probs.same_shape(grad))
        throw std::invalid_argument("softmax_backward: shape mismatch");
    ImageField out(probs.height, probs.width, probs.channels);
    parallel_rows(probs.height, [&](int r0, int r1) {
        for (int y = r0; y < r1; ++y)
            for (int x = 0; x < probs.width; ++x) {
                double dot = 0.0;
                for (int c = 0; c < probs.channels; ++c)
                    dot += static_cast<double>(probs.at(y, x, c)) * grad.at(y, x, c);
                for (int c = 0; c < probs.channels; ++c)
                    out.at(y, x, c) = static_cast<float>(
                        probs.at(y, x, c) * (grad.at(y, x, c) - dot));
            }
    });
    return out;
}

ImageField TrainState::kernels(const KernelLayout&) const {
    return softmax_field(kernel_logits);
}

ImageField TrainState::weights() const { return softmax_field(blend_logits); }

namespace {

double mean_l1(const ImageField& a, const ImageField& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i)
        s += std::abs(static_cast<double>(a.data[i]) - b.data[i]);
    return s / a.data.size();
}

void apply_step(ImageField& logits, const ImageField& grad, ImageField& m,
                ImageField& v, const TrainOptions& opts, int t) {
    if (!opts.adaptive_moments) {
        for (size_t i = 0; i < logits.data.size(); ++i)
            logits.data[i] -= static_cast<float>(opts.step_size * grad.data[i]);
        return;
    }
    const double b1 = 0.5, b2 = 0.999, eps = 1e-8;
    const double bc1 = 1.0 - std::pow(b1, t);
    const double bc2 = 1.0 - std::pow(b2, t);
    for (size_t i = 0; i < logits.data.size(); ++i) {
        const double g = grad.data[i];
        const double mi = b1 * m.data[i] + (1.0 - b1) * g;
        const double vi = b2 * v.data[i] + (1.0 - b2) * g * g;
        m.data[i] = static_cast<float>(mi);
        v.data[i] = static_cast<float>(vi);
        logits.data[i] -= static_cast<float>(
            opts.step_size * (mi / bc1) / (std::sqrt(vi / bc2) + eps));
    }
}

}  // namespace

TrainState train_toy(const SceneOracle& scene, const PanSpec& spec,
                     const TrainOptions& opts) {
    const int h = scene.center.height, w = scene.center.width;
    TrainState st;
    st.kernel_logits = ImageField(h, w, spec.layout.channels(), 0.0f);
    st.blend_logits = ImageField(h, w, spec.n_dilations, 0.0f);
    if (opts.adaptive_moments) {
        st.mk = ImageField(h, w, spec.layout.channels(), 0.0f);
        st.vk = ImageField(h, w, spec.layout.channels(), 0.0f);
        st.mw = ImageField(h, w, spec.n_dilations, 0.0f);
        st.vw = ImageField(h, w, spec.n_dilations, 0.0f);
    }

    const int channels = scene.center.channels;
    for (int it = 0; it <= opts.iters; ++it) {
        const ImageField kernels = softmax_field(st.kernel_logits);
        const ImageField weights = softmax_field(st.blend_logits);
        const ImageField pred = blend_forward(scene.center, kernels, weights, spec);
        const double loss = mean_l1(pred, scene.panned);
        if (!std::isfinite(loss))
            throw std::runtime_error("train_toy: loss diverged to non-finite");
        st.loss_history.push_back(loss);
        st.best_so_far.push_back(
            st.best_so_far.empty() ? loss : std::min(st.best_so_far.back(), loss));
        if (it == opts.iters) break;

        // per-pixel mean over channels; keeps step scale resolution-independent
        ImageField grad_out(h, w, channels);
        for (size_t i = 0; i < grad_out.data.size(); ++i) {
            const float d = pred.data[i] - scene.panned.data[i];
            grad_out.data[i] = (d > 0.0f ? 1.0f : (d < 0.0f ? -1.0f : 0.0f)) / channels;
        }
        const BlendGrads g = blend_backward(scene.center, kernels, weights, spec, grad_out);
        const ImageField glk = softmax_backward(kernels, g.kernels);
        const ImageField glw = softmax_backward(weights, g.weights);
        apply_step(st.kernel_logits, glk, st.mk, st.vk, opts, it + 1);
        apply_step(st.blend_logits, glw, st.mw, st.vw, opts, it + 1);
        ++st.step;
    }
    return st;
}

ToyEvalReport eval_toy(const TrainState& state, const SceneOracle& scene,
                       const PanSpec& spec) {
    ToyEvalReport rep;
    const ImageField kernels = softmax_field(state.kernel_logits);
    const ImageField weights = softmax_field(state.blend_logits);
    rep.reconstructed = blend_forward(scene.center, kernels, weights, spec);

    ImageField pred255 = rep.reconstructed;
    ImageField gt255 = scene.panned;
    for (float& v : pred255.data) v *= 255.0f;
    for (float& v : gt255.data) v *= 255.0f;
    rep.reconstruction = image_metrics(pred255, gt255);

    rep.disparity = primitive_disparity(kernels, spec.layout);
    ImageField mask(scene.disparity.height, scene.disparity.width, 1, 0.0f);
    ImageField pred_d = rep.disparity;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            if (scene.occlusion.at(y, x, 0) > 0.5f) continue;
            if (scene.disparity.at(y, x, 0) <= 0.0f) continue;
            mask.at(y, x, 0) = 1.0f;
            pred_d.at(y, x, 0) = std::max(pred_d.at(y, x, 0), 1e-6f);
        }
    rep.depth = depth_metrics(pred_d, scene.disparity, mask);
    return rep;
}

}  // namespace tpan
