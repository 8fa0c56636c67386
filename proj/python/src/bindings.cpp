// numpy-facing bindings for the core operators. Fields cross the
// boundary as float32 arrays shaped (H, W, C); single-channel maps also
// accept (H, W).
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "tpan/geometry.hpp"
#include "tpan/gradcheck.hpp"
#include "tpan/io.hpp"
#include "tpan/metrics.hpp"
#include "tpan/parallel.hpp"
#include "tpan/srstack.hpp"
#include "tpan/tkernel.hpp"
#include "tpan/toytrain.hpp"

namespace py = pybind11;
using namespace tpan;

namespace {

using Array = py::array_t<float, py::array::c_style | py::array::forcecast>;

ImageField to_field(const Array& a, const char* name) {
    const auto info = a.request();
    if (info.ndim != 2 && info.ndim != 3)
        throw std::invalid_argument(std::string(name) + ": expected a (H, W[, C]) array");
    const int h = static_cast<int>(info.shape[0]);
    const int w = static_cast<int>(info.shape[1]);
    const int c = info.ndim == 3 ? static_cast<int>(info.shape[2]) : 1;
    ImageField f(h, w, c);
    const float* src = static_cast<const float*>(info.ptr);
    std::copy(src, src + f.data.size(), f.data.begin());
    return f;
}

py::array from_field(const ImageField& f) {
    py::array_t<float> a({f.height, f.width, f.channels});
    std::copy(f.data.begin(), f.data.end(), static_cast<float*>(a.request().ptr));
    return a;
}

PanSpec make_spec(double pan, bool asymmetric) {
    PanSpec spec;
    spec.pan_amount = pan;
    spec.asymmetric_dilation_rule = asymmetric;
    return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "t-shaped adaptive-dilation view synthesis operators";

    m.def("set_thread_count", &set_thread_count, py::arg("n"));
    m.def("thread_count", &thread_count);

    m.def(
        "dilation_schedule",
        [](double pan, bool asymmetric) {
            return make_spec(pan, asymmetric).dilation_schedule();
        },
        py::arg("pan"), py::arg("asymmetric") = false,
        "Signed tap spacings [d_1..d_N] for a pan amount.");

    m.def(
        "tconv_forward",
        [](const Array& img, const Array& kernels, double d) {
            return from_field(
                tconv_forward(to_field(img, "img"), to_field(kernels, "kernels"), {}, d));
        },
        py::arg("img"), py::arg("kernels"), py::arg("d"),
        "Single t-shaped convolution at signed dilation d.");

    m.def(
        "blend_forward",
        [](const Array& img, const Array& kernels, const Array& weights, double pan,
           bool asymmetric) {
            return from_field(blend_forward(to_field(img, "img"), to_field(kernels, "kernels"),
                                            to_field(weights, "weights"),
                                            make_spec(pan, asymmetric)));
        },
        py::arg("img"), py::arg("kernels"), py::arg("weights"), py::arg("pan"),
        py::arg("asymmetric") = false,
        "Dilation-blended synthesis of the panned view.");

    m.def(
        "blend_backward",
        [](const Array& img, const Array& kernels, const Array& weights, double pan,
           const Array& grad_out, bool asymmetric) {
            const BlendGrads g = blend_backward(
                to_field(img, "img"), to_field(kernels, "kernels"),
                to_field(weights, "weights"), make_spec(pan, asymmetric),
                to_field(grad_out, "grad_out"));
            return py::make_tuple(from_field(g.kernels), from_field(g.weights),
                                  from_field(g.image));
        },
        py::arg("img"), py::arg("kernels"), py::arg("weights"), py::arg("pan"),
        py::arg("grad_out"), py::arg("asymmetric") = false,
        "Adjoint of blend_forward: (grad_kernels, grad_weights, grad_img).");

    m.def(
        "primitive_disparity",
        [](const Array& kernels) {
            return from_field(primitive_disparity(to_field(kernels, "kernels")));
        },
        py::arg("kernels"), "Normalized disparity encoded in the long wing.");

    m.def(
        "primitive_occlusion",
        [](const Array& kernels) {
            return from_field(primitive_occlusion(to_field(kernels, "kernels")));
        },
        py::arg("kernels"), "Kernel mass on the short and vertical wings.");

    m.def(
        "spp_blend",
        [](const Array& disp_fwd, const Array& disp_bwd, const Array& amb_fwd,
           const Array& amb_bwd) {
            return from_field(spp_blend(to_field(disp_fwd, "disp_fwd"),
                                        to_field(disp_bwd, "disp_bwd"),
                                        to_field(amb_fwd, "amb_fwd"),
                                        to_field(amb_bwd, "amb_bwd")));
        },
        py::arg("disp_fwd"), py::arg("disp_bwd"), py::arg("amb_fwd"), py::arg("amb_bwd"),
        "Ambiguity-weighted softmax blend of two disparity maps.");

    m.def(
        "scale_pan",
        [](const std::map<std::string, double>& baselines, const std::string& ref,
           const std::string& dataset, double pan) {
            BaselineTable table{baselines, ref};
            return scale_pan(table, dataset, pan);
        },
        py::arg("baselines"), py::arg("ref"), py::arg("dataset"), py::arg("pan"),
        "Pan amount rescaled to another stereo baseline.");

    m.def(
        "shift_downscale",
        [](const Array& img, double stride) {
            return from_field(shift_downscale(to_field(img, "img"), stride));
        },
        py::arg("img"), py::arg("stride"),
        "Horizontally shifted 2x bilinear downscale.");

    m.def(
        "build_stack",
        [](const Array& img, double pan, double max_disp, int levels) {
            const ShiftStack s = build_stack(to_field(img, "img"), pan, max_disp, levels);
            py::list out;
            for (const ImageField& level : s.levels) out.append(from_field(level));
            return out;
        },
        py::arg("img"), py::arg("pan"), py::arg("max_disp"), py::arg("levels") = 32,
        "Progressively shifted downscale stack as a list of arrays.");

    m.def(
        "pan_loss",
        [](const Array& gt, const Array& out_hr, const Array& out_lr, bool with_features,
           double alpha_p) {
            const LossReport r =
                pan_loss(to_field(gt, "gt"), to_field(out_hr, "out_hr"),
                         to_field(out_lr, "out_lr"),
                         with_features ? avg_pool_extractor() : FeatureExtractor(nullptr),
                         alpha_p);
            py::dict d;
            d["l1_hr"] = r.l1_hr;
            d["l1_lr"] = r.l1_lr;
            if (r.feature_term) d["feature_term"] = *r.feature_term;
            d["total"] = r.total;
            return d;
        },
        py::arg("gt"), py::arg("out_hr"), py::arg("out_lr"), py::arg("with_features") = false,
        py::arg("alpha_p") = 0.01, "Reconstruction loss report as a dict.");

    m.def(
        "image_metrics",
        [](const Array& pred, const Array& gt) {
            const ImageMetrics im = image_metrics(to_field(pred, "pred"), to_field(gt, "gt"));
            py::dict d;
            d["rmse"] = im.rmse;
            d["psnr"] = im.psnr;
            d["ssim"] = im.ssim;
            return d;
        },
        py::arg("pred"), py::arg("gt"), "RMSE/PSNR/SSIM on a 0-255 value scale.");

    m.def(
        "depth_metrics",
        [](const Array& pred, const Array& gt, const Array& mask) {
            const DepthMetrics dm = depth_metrics(to_field(pred, "pred"), to_field(gt, "gt"),
                                                  to_field(mask, "mask"));
            py::dict d;
            d["abs_rel"] = dm.abs_rel;
            d["sq_rel"] = dm.sq_rel;
            d["rms"] = dm.rms;
            d["log_rms"] = dm.log_rms;
            d["a1"] = dm.a1;
            d["a2"] = dm.a2;
            d["a3"] = dm.a3;
            return d;
        },
        py::arg("pred"), py::arg("gt"), py::arg("mask"), "Masked depth error aggregates.");

    m.def(
        "make_scene",
        [](const std::string& kind, int h, int w, const std::vector<double>& disparities,
           double pan, unsigned seed) {
            const SceneOracle s =
                make_scene(scene_kind_from_string(kind), h, w, disparities, pan, seed);
            py::dict d;
            d["center"] = from_field(s.center);
            d["panned"] = from_field(s.panned);
            d["disparity"] = from_field(s.disparity);
            d["occlusion"] = from_field(s.occlusion);
            d["pan"] = s.pan_amount;
            return d;
        },
        py::arg("kind"), py::arg("height"), py::arg("width"), py::arg("disparities"),
        py::arg("pan"), py::arg("seed") = 0,
        "Layered synthetic scene with exact disparity/occlusion ground truth.");

    m.def(
        "train_toy",
        [](const std::string& kind, int h, int w, const std::vector<double>& disparities,
           double pan, unsigned seed, int iters, double step, bool adam) {
            PanSpec spec = make_spec(pan, false);
            const SceneOracle scene =
                make_scene(scene_kind_from_string(kind), h, w, disparities, pan, seed);
            TrainOptions opts;
            opts.iters = iters;
            opts.step_size = step;
            opts.seed = seed;
            opts.adaptive_moments = adam;
            const TrainState st = train_toy(scene, spec, opts);
            const ToyEvalReport rep = eval_toy(st, scene, spec);
            py::dict d;
            d["loss_history"] = st.loss_history;
            d["kernels"] = from_field(st.kernels(spec.layout));
            d["weights"] = from_field(st.weights());
            d["reconstructed"] = from_field(rep.reconstructed);
            d["disparity"] = from_field(rep.disparity);
            d["psnr"] = rep.reconstruction.psnr;
            d["a1"] = rep.depth.a1;
            return d;
        },
        py::arg("kind"), py::arg("height"), py::arg("width"), py::arg("disparities"),
        py::arg("pan"), py::arg("seed") = 0, py::arg("iters") = 100, py::arg("step") = 0.5,
        py::arg("adam") = false,
        "Fit per-pixel logits on a synthetic scene; returns fields and summaries.");

    m.def(
        "check_blend_gradients",
        [](int h, int w, unsigned seed, double pan) {
            const GradCheckReport r = check_blend_gradients(h, w, seed, make_spec(pan, false));
            py::dict d;
            d["kernels"] = r.max_err_kernels;
            d["weights"] = r.max_err_weights;
            d["image"] = r.max_err_image;
            return d;
        },
        py::arg("height"), py::arg("width"), py::arg("seed"), py::arg("pan") = 153.0,
        "Finite-difference check of blend_backward; max relative error per group.");

    m.def(
        "read_mnrt", [](const std::string& path) { return from_field(read_mnrt(path)); },
        py::arg("path"));
    m.def(
        "write_mnrt",
        [](const std::string& path, const Array& a) { write_mnrt(path, to_field(a, "field")); },
        py::arg("path"), py::arg("field"));
    m.def(
        "read_png", [](const std::string& path) { return from_field(read_png(path)); },
        py::arg("path"));
    m.def(
        "write_png",
        [](const std::string& path, const Array& a) { write_png(path, to_field(a, "image")); },
        py::arg("path"), py::arg("image"));

    py::register_exception<io_error>(m, "IoError", PyExc_IOError);
}
