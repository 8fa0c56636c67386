#pragma once

#include <map>
#include <string>

#include "tpan/tkernel.hpp"

namespace tpan {

/// Normalized disparity encoded in the long wing: the expected tap index
/// divided by the wing length, clamped to [0,1]. 1.0 corresponds to
/// |pan_amount| pixels.
ImageField primitive_disparity(const ImageField& kernels, const KernelLayout& layout = {});

/// Total kernel mass on the short and vertical wings; fill-in from
/// non-pan-direction context. Clamped below at 0.
ImageField primitive_occlusion(const ImageField& kernels, const KernelLayout& layout = {});

/// Dataset-tag -> stereo baseline (cm), with a designated reference tag.
struct BaselineTable {
    std::map<std::string, double> baselines;
    std::string reference;
};

/// reference_pan * baseline[dataset] / baseline[reference].
double scale_pan(const BaselineTable& table, const std::string& dataset,
                 double reference_pan);

/// Softmax blend of forward/backward-pass disparities by their ambiguity
/// logits (stabilized two-way softmax per pixel).
ImageField spp_blend(const ImageField& disp_fwd, const ImageField& disp_bwd,
                     const ImageField& amb_fwd, const ImageField& amb_bwd);

/// mean|d_op - down2(d_o)| + mean|d_cp - down2(d_c)|; the primitives are
/// at half the resolution of the refined maps.
double primitive_disparity_loss(const ImageField& d_op, const ImageField& d_cp,
                                const ImageField& d_o, const ImageField& d_c);

}  // namespace tpan
