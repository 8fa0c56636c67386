// Command-line surface over the core library: view synthesis, map
// extraction, gradient checks, toy training, shift stacks and metric
// reports. Every command either writes all of its artifacts or none
// (write-to-temp, rename-on-success).
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tpan/geometry.hpp"
#include "tpan/gradcheck.hpp"
#include "tpan/io.hpp"
#include "tpan/metrics.hpp"
#include "tpan/parallel.hpp"
#include "tpan/srstack.hpp"
#include "tpan/tkernel.hpp"
#include "tpan/toytrain.hpp"

namespace {

using namespace tpan;

// Exit-code convention: 0 success, 1 check failure, 2 I/O or format
// error, 3 shape/precondition violation.
constexpr int kExitCheckFailure = 1;
constexpr int kExitIoError = 2;
constexpr int kExitPrecondition = 3;

/// Staged artifact writer: buffers (path, writer) pairs, writes each to
/// "<path>.tmp" and renames everything only after every write succeeded.
class ArtifactSet {
  public:
    void add(std::string path, std::function<void(const std::string&)> writer) {
        items_.emplace_back(std::move(path), std::move(writer));
    }

    void commit() {
        std::vector<std::string> written;
        try {
            for (const auto& [path, writer] : items_) {
                writer(path + ".tmp");
                written.push_back(path);
            }
            for (const auto& path : written)
                std::filesystem::rename(path + ".tmp", path);
        } catch (...) {
            for (const auto& path : written) {
                std::error_code ec;
                std::filesystem::remove(path + ".tmp", ec);
            }
            throw;
        }
    }

  private:
    std::vector<std::pair<std::string, std::function<void(const std::string&)>>> items_;
};

void require_spatial_match(const ImageField& a, const ImageField& b,
                           const std::string& what) {
    if (!a.same_spatial(b))
        throw std::invalid_argument(what + ": spatial dimensions disagree (" +
                                    std::to_string(a.height) + "x" + std::to_string(a.width) +
                                    " vs " + std::to_string(b.height) + "x" +
                                    std::to_string(b.width) + ")");
}

void require_channels(const ImageField& f, int channels, const std::string& what) {
    if (f.channels != channels)
        throw std::invalid_argument(what + ": expected " + std::to_string(channels) +
                                    " channels, got " + std::to_string(f.channels));
}

BaselineTable parse_baselines(const std::string& packed, const std::string& ref) {
    BaselineTable table;
    std::stringstream ss(packed);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw io_error("--baselines: expected tag=value, got '" + item + "'");
        try {
            table.baselines[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw io_error("--baselines: bad numeric value in '" + item + "'");
        }
    }
    if (table.baselines.empty()) throw io_error("--baselines: empty table");
    table.reference = ref;
    return table;
}

int cmd_pan(const std::string& input, const std::string& params_path,
            const std::string& weights_path, double pan, bool asymmetric,
            const std::string& out) {
    PanSpec spec;
    spec.pan_amount = pan;
    spec.asymmetric_dilation_rule = asymmetric;
    const ImageField img = read_png(input);
    const ImageField kernels = read_mnrt(params_path);
    const ImageField weights = read_mnrt(weights_path);
    require_channels(kernels, spec.layout.channels(), "params");
    require_channels(weights, spec.n_dilations, "weights");
    require_spatial_match(img, kernels, "input vs params");
    require_spatial_match(img, weights, "input vs weights");
    const ImageField result = blend_forward(img, kernels, weights, spec);
    ArtifactSet artifacts;
    artifacts.add(out, [&](const std::string& p) { write_png(p, result); });
    artifacts.commit();
    return 0;
}

int cmd_extract(const std::string& params_path, const std::string& prefix) {
    const KernelLayout layout;
    const ImageField kernels = read_mnrt(params_path);
    require_channels(kernels, layout.channels(), "params");
    const ImageField disp = primitive_disparity(kernels, layout);
    const ImageField occ = primitive_occlusion(kernels, layout);
    ArtifactSet artifacts;
    artifacts.add(prefix + "_disp.mnrt", [&](const std::string& p) { write_mnrt(p, disp); });
    artifacts.add(prefix + "_disp.png", [&](const std::string& p) { write_png(p, disp); });
    artifacts.add(prefix + "_occ.mnrt", [&](const std::string& p) { write_mnrt(p, occ); });
    artifacts.add(prefix + "_occ.png", [&](const std::string& p) { write_png(p, occ); });
    artifacts.commit();
    return 0;
}

int cmd_gradcheck(int h, int w, unsigned seed, double tol, double pan) {
    PanSpec spec;
    spec.pan_amount = pan;
    const GradCheckReport rep = check_blend_gradients(h, w, seed, spec);
    std::printf("grad_kernels=%.6g grad_weights=%.6g grad_img=%.6g tol=%.6g\n",
                rep.max_err_kernels, rep.max_err_weights, rep.max_err_image, tol);
    return rep.pass(tol) ? 0 : kExitCheckFailure;
}

int cmd_train_toy(const std::string& scene_name, int h, int w,
                  const std::vector<double>& disparities, double pan, int iters,
                  double step, unsigned seed, bool adam, const std::string& prefix) {
    PanSpec spec;
    spec.pan_amount = pan;
    const SceneOracle scene =
        make_scene(scene_kind_from_string(scene_name), h, w, disparities, pan, seed);
    TrainOptions opts;
    opts.iters = iters;
    opts.step_size = step;
    opts.seed = seed;
    opts.adaptive_moments = adam;
    const TrainState state = train_toy(scene, spec, opts);
    const ToyEvalReport rep = eval_toy(state, scene, spec);

    ArtifactSet artifacts;
    artifacts.add(prefix + "_loss.csv", [&](const std::string& p) {
        FILE* f = std::fopen(p.c_str(), "w");
        if (!f) throw io_error("cannot open " + p);
        std::fprintf(f, "iter,loss\n");
        for (size_t i = 0; i < state.loss_history.size(); ++i)
            std::fprintf(f, "%zu,%.9g\n", i, state.loss_history[i]);
        std::fclose(f);
    });
    const ImageField kernels = state.kernels(spec.layout);
    const ImageField weights = state.weights();
    artifacts.add(prefix + "_kernels.mnrt",
                  [&](const std::string& p) { write_mnrt(p, kernels); });
    artifacts.add(prefix + "_blend.mnrt",
                  [&](const std::string& p) { write_mnrt(p, weights); });
    artifacts.add(prefix + "_recon.png",
                  [&](const std::string& p) { write_png(p, rep.reconstructed); });
    artifacts.add(prefix + "_disp.png",
                  [&](const std::string& p) { write_png(p, rep.disparity); });
    artifacts.commit();
    std::printf("initial_loss=%.6g final_loss=%.6g psnr=%.6g a1=%.6g\n",
                state.loss_history.front(), state.loss_history.back(),
                rep.reconstruction.psnr, rep.depth.a1);
    return 0;
}

int cmd_stack(const std::string& input, double pan, double max_disp, int levels,
              const std::string& out) {
    const ImageField img = read_png(input);
    const ShiftStack stack = build_stack(img, pan, max_disp, levels);
    ArtifactSet artifacts;
    artifacts.add(out, [&](const std::string& p) { write_stack(p, stack); });
    artifacts.commit();
    return 0;
}

int cmd_metrics(const std::string& pred_path, const std::string& ref_path) {
    ImageField pred = read_png(pred_path);
    ImageField ref = read_png(ref_path);
    if (!pred.same_shape(ref))
        throw std::invalid_argument("pred vs ref: shape mismatch");
    for (float& v : pred.data) v *= 255.0f;
    for (float& v : ref.data) v *= 255.0f;
    const ImageMetrics m = image_metrics(pred, ref);
    std::printf("rmse=%.6g psnr=%.6g ssim=%.6g\n", m.rmse, m.psnr, m.ssim);
    return 0;
}

int cmd_depth_metrics(const std::string& pred_path, const std::string& gt_path,
                      const std::string& mask_path) {
    const ImageField pred = read_mnrt(pred_path);
    const ImageField gt = read_mnrt(gt_path);
    ImageField mask;
    if (mask_path.empty()) {
        mask = ImageField(pred.height, pred.width, 1, 1.0f);
    } else {
        mask = read_mnrt(mask_path);
    }
    const DepthMetrics m = depth_metrics(pred, gt, mask);
    std::printf("abs_rel=%.6g sq_rel=%.6g rms=%.6g log_rms=%.6g a1=%.6g a2=%.6g a3=%.6g\n",
                m.abs_rel, m.sq_rel, m.rms, m.log_rms, m.a1, m.a2, m.a3);
    return 0;
}

int cmd_spp(const std::string& disp_fwd, const std::string& disp_bwd,
            const std::string& amb_fwd, const std::string& amb_bwd,
            const std::string& prefix) {
    const ImageField df = read_mnrt(disp_fwd);
    const ImageField db = read_mnrt(disp_bwd);
    const ImageField af = read_mnrt(amb_fwd);
    const ImageField ab = read_mnrt(amb_bwd);
    const ImageField blended = spp_blend(df, db, af, ab);
    ArtifactSet artifacts;
    artifacts.add(prefix + ".mnrt", [&](const std::string& p) { write_mnrt(p, blended); });
    artifacts.add(prefix + ".png", [&](const std::string& p) { write_png(p, blended); });
    artifacts.commit();
    return 0;
}

int cmd_scale_pan(const std::string& baselines, const std::string& ref,
                  const std::string& dataset, double pan) {
    const BaselineTable table = parse_baselines(baselines, ref);
    std::printf("%.6f\n", scale_pan(table, dataset, pan));
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"t-shaped adaptive-dilation view synthesis toolkit"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker thread cap (default: hardware)");

    // pan
    std::string in_png, params_path, weights_path, out_path, prefix;
    double pan = 153.0;
    bool asymmetric = false;
    auto* pan_cmd = app.add_subcommand("pan", "synthesize a panned view");
    pan_cmd->add_option("--input", in_png, "center view PNG")->required();
    pan_cmd->add_option("--params", params_path, "81-channel kernel field MNRT")->required();
    pan_cmd->add_option("--weights", weights_path, "blend weight field MNRT")->required();
    pan_cmd->add_option("--pan", pan, "signed pan amount in pixels")->required();
    pan_cmd->add_flag("--asymmetric-dilation", asymmetric,
                      "derive the global dilation from the literal per-direction divisor");
    pan_cmd->add_option("--out", out_path, "output PNG")->required();

    // extract
    auto* extract_cmd = app.add_subcommand("extract", "disparity/occlusion maps from kernels");
    extract_cmd->add_option("--params", params_path, "81-channel kernel field MNRT")->required();
    extract_cmd->add_option("--out-prefix", prefix, "artifact path prefix")->required();

    // gradcheck
    int gc_h = 6, gc_w = 9;
    unsigned seed = 0;
    double tol = 1e-4;
    auto* gc_cmd = app.add_subcommand("gradcheck", "finite-difference gradient verification");
    gc_cmd->set_help_flag("--help", "print this help message");  // frees -h for --h
    gc_cmd->add_option("--seed", seed, "instance seed");
    gc_cmd->add_option("--h", gc_h, "field height")->check(CLI::Range(4, 1 << 20));
    gc_cmd->add_option("--w", gc_w, "field width")->check(CLI::Range(4, 1 << 20));
    gc_cmd->add_option("--tol", tol, "relative tolerance");
    gc_cmd->add_option("--pan", pan, "signed pan amount in pixels");

    // train-toy
    std::string scene_name = "noise";
    int h = 64, w = 96, iters = 500;
    double step = 0.5;
    std::vector<double> disparities;
    bool adam = false;
    auto* train_cmd = app.add_subcommand("train-toy", "fit per-pixel logits on a synthetic scene");
    train_cmd->add_option("--scene", scene_name, "checker|noise|bars");
    train_cmd->add_option("--height", h, "scene height")->check(CLI::Range(2, 1 << 20));
    train_cmd->add_option("--width", w, "scene width")->check(CLI::Range(2, 1 << 20));
    train_cmd->add_option("--disp", disparities, "per-layer disparities, front to back")
        ->required();
    train_cmd->add_option("--pan", pan, "signed pan amount in pixels")->required();
    train_cmd->add_option("--iters", iters, "gradient steps")->check(CLI::Range(1, 1 << 20));
    train_cmd->add_option("--step", step, "step size on logits");
    train_cmd->add_option("--seed", seed, "scene seed");
    train_cmd->add_flag("--adam", adam, "adaptive-moment updates (beta 0.5/0.999)");
    train_cmd->add_option("--out-prefix", prefix, "artifact path prefix")->required();

    // stack
    double max_disp = 1.0;
    int levels = 32;
    auto* stack_cmd = app.add_subcommand("stack", "build a shifted downscale stack");
    stack_cmd->add_option("--input", in_png, "input PNG (even dims)")->required();
    stack_cmd->add_option("--pan", pan, "signed pan amount in pixels")->required();
    stack_cmd->add_option("--max-disp", max_disp, "maximum normalized disparity")->required();
    stack_cmd->add_option("--levels", levels, "stack depth")->check(CLI::Range(1, 4096));
    stack_cmd->add_option("--out", out_path, "output stack file")->required();

    // metrics
    std::string pred_path, ref_path, mask_path;
    auto* metrics_cmd = app.add_subcommand("metrics", "rmse/psnr/ssim between two PNGs");
    metrics_cmd->add_option("--pred", pred_path, "prediction PNG")->required();
    metrics_cmd->add_option("--ref", ref_path, "reference PNG")->required();

    // depth-metrics
    auto* depth_cmd = app.add_subcommand("depth-metrics", "masked depth error aggregates");
    depth_cmd->add_option("--pred", pred_path, "predicted map MNRT")->required();
    depth_cmd->add_option("--gt", ref_path, "ground-truth map MNRT")->required();
    depth_cmd->add_option("--mask", mask_path, "validity mask MNRT (default: all valid)");

    // spp
    std::string disp_fwd, disp_bwd, amb_fwd, amb_bwd;
    auto* spp_cmd = app.add_subcommand("spp", "ambiguity-weighted blend of two disparity maps");
    spp_cmd->add_option("--disp-fwd", disp_fwd, "forward-pass disparity MNRT")->required();
    spp_cmd->add_option("--disp-bwd", disp_bwd, "backward-pass disparity MNRT")->required();
    spp_cmd->add_option("--amb-fwd", amb_fwd, "forward ambiguity logits MNRT")->required();
    spp_cmd->add_option("--amb-bwd", amb_bwd, "backward ambiguity logits MNRT")->required();
    spp_cmd->add_option("--out-prefix", prefix, "artifact path prefix")->required();

    // scale-pan
    std::string baselines, ref_tag, dataset;
    auto* scale_cmd = app.add_subcommand("scale-pan", "pan amount for another stereo baseline");
    scale_cmd->add_option("--baselines", baselines, "tag=value,... baseline table")->required();
    scale_cmd->add_option("--ref", ref_tag, "reference tag")->required();
    scale_cmd->add_option("--dataset", dataset, "target tag")->required();
    scale_cmd->add_option("--pan", pan, "reference pan amount")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitIoError;
    }
    if (threads > 0) set_thread_count(threads);

    if (pan_cmd->parsed())
        return cmd_pan(in_png, params_path, weights_path, pan, asymmetric, out_path);
    if (extract_cmd->parsed()) return cmd_extract(params_path, prefix);
    if (gc_cmd->parsed()) return cmd_gradcheck(gc_h, gc_w, seed, tol, pan);
    if (train_cmd->parsed())
        return cmd_train_toy(scene_name, h, w, disparities, pan, iters, step, seed, adam,
                             prefix);
    if (stack_cmd->parsed()) return cmd_stack(in_png, pan, max_disp, levels, out_path);
    if (metrics_cmd->parsed()) return cmd_metrics(pred_path, ref_path);
    if (depth_cmd->parsed()) return cmd_depth_metrics(pred_path, ref_path, mask_path);
    if (spp_cmd->parsed()) return cmd_spp(disp_fwd, disp_bwd, amb_fwd, amb_bwd, prefix);
    if (scale_cmd->parsed()) return cmd_scale_pan(baselines, ref_tag, dataset, pan);
    return kExitIoError;  // unreachable: a subcommand is required
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const tpan::io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIoError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitPrecondition;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCheckFailure;
    }
}
