#include "tpan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tpan/parallel.hpp"

namespace tpan {

namespace {

// 2x average pool with clamped edges (handles odd dims).
ImageField avg_pool_2x(const ImageField& img) {
    const int oh = (img.height + 1) / 2;
    const int ow = (img.width + 1) / 2;
    ImageField out(oh, ow, img.channels);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x)
            for (int c = 0; c < img.channels; ++c) {
                const int y1 = std::min(2 * y + 1, img.height - 1);
                const int x1 = std::min(2 * x + 1, img.width - 1);
                out.at(y, x, c) = static_cast<float>(
                    0.25 * (static_cast<double>(img.at(2 * y, 2 * x, c)) +
                            img.at(2 * y, x1, c) + img.at(y1, 2 * x, c) +
                            img.at(y1, x1, c)));
            }
    return out;
}

double mean_abs_diff(const ImageField& a, const ImageField& b, const char* what) {
    if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": shape mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i)
        s += std::abs(static_cast<double>(a.data[i]) - b.data[i]);
    return s / a.data.size();
}

double mse(const ImageField& a, const ImageField& b, const char* what) {
    if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": shape mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - b.data[i];
        s += d * d;
    }
    return s / a.data.size();
}

}  // namespace

FeatureExtractor avg_pool_extractor(int levels) {
    return [levels](const ImageField& img) {
        std::vector<ImageField> out;
        ImageField cur = img;
        for (int l = 0; l < levels; ++l) {
            cur = avg_pool_2x(cur);
            out.push_back(cur);
        }
        return out;
    };
}

LossReport pan_loss(const ImageField& gt, const ImageField& out_hr,
                    const ImageField& out_lr, const FeatureExtractor& features,
                    double alpha_p) {
    if (gt.height % 2 != 0 || gt.width % 2 != 0)
        throw std::invalid_argument("pan_loss: ground truth dims must be even");
    LossReport r;
    r.alpha_p = alpha_p;
    r.l1_hr = mean_abs_diff(gt, out_hr, "pan_loss hr");
    const ImageField gt_half = downscale_bilinear_2x(gt);
    r.l1_lr = mean_abs_diff(gt_half, out_lr, "pan_loss lr");
    if (features) {
        const auto f_gt = features(gt);
        const auto f_hr = features(out_hr);
        const auto f_gth = features(gt_half);
        const auto f_lr = features(out_lr);
        double term = 0.0;
        for (size_t l = 0; l < f_gt.size(); ++l) {
            term += mse(f_gt[l], f_hr[l], "pan_loss feature hr");
            term += mse(f_gth[l], f_lr[l], "pan_loss feature lr");
        }
        r.feature_term = term;
    }
    r.total = r.l1_hr + r.l1_lr + alpha_p * r.feature_term.value_or(0.0);
    return r;
}

namespace {

// SSIM constants for dynamic range 255.
constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);

double ssim_channel(const ImageField& a, const ImageField& b, int c) {
    const int win = 11;
    const int half = win / 2;
    const double sigma = 1.5;
    double g[11][11];
    double gsum = 0.0;
    for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) {
            const double dy = i - half, dx = j - half;
            g[i][j] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            gsum += g[i][j];
        }
    for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) g[i][j] /= gsum;

    if (a.height < win || a.width < win) {
        // one uniform window over the whole image
        double ma = 0.0, mb = 0.0;
        const double n = static_cast<double>(a.height) * a.width;
        for (int y = 0; y < a.height; ++y)
            for (int x = 0; x < a.width; ++x) {
                ma += a.at(y, x, c);
                mb += b.at(y, x, c);
            }
        ma /= n;
        mb /= n;
        double va = 0.0, vb = 0.0, cov = 0.0;
        for (int y = 0; y < a.height; ++y)
            for (int x = 0; x < a.width; ++x) {
                const double da = a.at(y, x, c) - ma;
                const double db = b.at(y, x, c) - mb;
                va += da * da;
                vb += db * db;
                cov += da * db;
            }
        va /= n;
        vb /= n;
        cov /= n;
        return ((2 * ma * mb + kC1) * (2 * cov + kC2)) /
               ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
    }

    double acc = 0.0;
    long count = 0;
    for (int y = half; y < a.height - half; ++y) {
        for (int x = half; x < a.width - half; ++x) {
            double ma = 0.0, mb = 0.0;
            for (int i = 0; i < win; ++i)
                for (int j = 0; j < win; ++j) {
                    ma += g[i][j] * a.at(y + i - half, x + j - half, c);
                    mb += g[i][j] * b.at(y + i - half, x + j - half, c);
                }
            double va = 0.0, vb = 0.0, cov = 0.0;
            for (int i = 0; i < win; ++i)
                for (int j = 0; j < win; ++j) {
                    const double da = a.at(y + i - half, x + j - half, c) - ma;
                    const double db = b.at(y + i - half, x + j - half, c) - mb;
                    va += g[i][j] * da * da;
                    vb += g[i][j] * db * db;
                    cov += g[i][j] * da * db;
                }
            acc += ((2 * ma * mb + kC1) * (2 * cov + kC2)) /
                   ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
            ++count;
        }
    }
    return acc / count;
}

}  // namespace

ImageMetrics image_metrics(const ImageField& pred, const ImageField& gt) {
    if (!pred.same_shape(gt))
        throw std::invalid_argument("image_metrics: shape mismatch");
    ImageMetrics m;
    m.rmse = std::sqrt(mse(pred, gt, "image_metrics"));
    m.psnr = m.rmse == 0.0 ? std::numeric_limits<double>::infinity()
                           : 20.0 * std::log10(255.0 / m.rmse);
    double s = 0.0;
    for (int c = 0; c < pred.channels; ++c) s += ssim_channel(pred, gt, c);
    m.ssim = s / pred.channels;
    return m;
}

DepthMetrics depth_metrics(const ImageField& pred, const ImageField& gt,
                           const ImageField& mask) {
    if (!pred.same_shape(gt) || !pred.same_spatial(mask))
        throw std::invalid_argument("depth_metrics: shape mismatch");
    if (pred.channels != 1 || mask.channels != 1)
        throw std::invalid_argument("depth_metrics: expects single-channel maps");
    DepthMetrics m;
    long n = 0;
    double abs_rel = 0.0, sq_rel = 0.0, sq = 0.0, log_sq = 0.0;
    long a1 = 0, a2 = 0, a3 = 0;
    for (int y = 0; y < pred.height; ++y)
        for (int x = 0; x < pred.width; ++x) {
            if (mask.at(y, x, 0) <= 0.5f) continue;
            const double p = pred.at(y, x, 0);
            const double g = gt.at(y, x, 0);
            if (p <= 0.0 || g <= 0.0)
                throw std::invalid_argument("depth_metrics: nonpositive value on mask");
            const double d = p - g;
            abs_rel += std::abs(d) / g;
            sq_rel += d * d / g;
            sq += d * d;
            const double ld = std::log(p) - std::log(g);
            log_sq += ld * ld;
            const double ratio = std::max(p / g, g / p);
            if (ratio < 1.25) ++a1;
            if (ratio < 1.25 * 1.25) ++a2;
            if (ratio < 1.25 * 1.25 * 1.25) ++a3;
            ++n;
        }
    if (n == 0) throw std::invalid_argument("depth_metrics: empty mask");
    m.abs_rel = abs_rel / n;
    m.sq_rel = sq_rel / n;
    m.rms = std::sqrt(sq / n);
    m.log_rms = std::sqrt(log_sq / n);
    m.a1 = static_cast<double>(a1) / n;
    m.a2 = static_cast<double>(a2) / n;
    m.a3 = static_cast<double>(a3) / n;
    return m;
}

}  // namespace tpan
