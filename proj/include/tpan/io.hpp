#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "tpan/image.hpp"

namespace tpan {

/// Raised on missing files, malformed headers or failed writes.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// MNRT raw field format: 4-byte magic "MNRT", u32-LE H, W, C, then
/// H*W*C IEEE-754 f32-LE values in (y, x, c) order.
void write_mnrt(const std::string& path, const ImageField& img);
ImageField read_mnrt(const std::string& path);

/// 8-bit PNG. Values map linearly between [0,1] and [0,255]; writing
/// rounds half up and clamps. Gray and RGB(A) inputs load as C=1 / C=3.
void write_png(const std::string& path, const ImageField& img);
ImageField read_png(const std::string& path);

/// Quantization used by write_png, exposed for tests.
inline int quantize_u8(float v) {
    const int q = static_cast<int>(std::floor(v * 255.0f + 0.5f));
    return q < 0 ? 0 : (q > 255 ? 255 : q);
}

}  // namespace tpan
