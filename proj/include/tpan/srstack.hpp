#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tpan/image.hpp"

namespace tpan {

/// Progressively shifted, 2x-downscaled copies of the center view. Level
/// 0 is always the unshifted downscale; strides grow linearly with the
/// level index and carry the sign of the pan amount.
struct ShiftStack {
    std::vector<ImageField> levels;
    double pan_amount = 0.0;
    double max_disp = 0.0;

    int depth() const { return static_cast<int>(levels.size()); }
    double stride(int n) const {
        return n * pan_amount / depth() * max_disp;
    }
};

/// Level n = shift_downscale(img, n * pan / n_levels * max_disp).
ShiftStack build_stack(const ImageField& img, double pan_amount, double max_disp,
                       int n_levels);

/// Pluggable fusion stage: maps the LR panned view plus the stack to a
/// C-channel LR residual field.
using FusionStage = std::function<ImageField(const ImageField& lr_pan, const ShiftStack&)>;

/// Stage contributing nothing; fuse() then reduces to the plain bilinear
/// 2x upscale of the LR panned view.
FusionStage identity_fusion();

/// Fixed linear test stage: mean of the LR panned view and every stack level.
FusionStage average_fusion();

/// Full-resolution composition: nearest-2x upscale of the stage output
/// plus the bilinear 2x upscale of the LR panned view as residual target.
ImageField fuse(const ShiftStack& stack, const ImageField& lr_pan,
                const FusionStage& stage);

/// One text header line "n_levels pan_amount max_disp" followed by the
/// levels as concatenated MNRT fields.
void write_stack(const std::string& path, const ShiftStack& stack);
ShiftStack read_stack(const std::string& path);

}  // namespace tpan
