#pragma once

#include "tpan/tkernel.hpp"

namespace tpan {

struct GradCheckReport {
    double max_err_kernels = 0.0;
    double max_err_weights = 0.0;
    double max_err_image = 0.0;

    double worst() const;
    bool pass(double tol) const { return worst() < tol; }
};

/// Central finite-difference verification of blend_backward on a random
/// instance, using the scalar loss L = sum(out^2). Kernel and weight
/// entries are checked exhaustively via local recompute; image entries
/// are subsampled when they exceed max_image_entries. Errors are
/// relative with a small absolute floor.
GradCheckReport check_blend_gradients(int height, int width, unsigned seed,
                                      const PanSpec& spec,
                                      int max_image_entries = 300);

}  // namespace tpan
