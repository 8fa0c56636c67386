#include "tpan/srstack.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tpan/io.hpp"

namespace tpan {

ShiftStack build_stack(const ImageField& img, double pan_amount, double max_disp,
                       int n_levels) {
    if (n_levels < 1)
        throw std::invalid_argument("build_stack: need at least one level");
    if (img.height % 2 != 0 || img.width % 2 != 0)
        throw std::invalid_argument("build_stack: dimensions must be even");
    ShiftStack stack;
    stack.pan_amount = pan_amount;
    stack.max_disp = max_disp;
    stack.levels.reserve(n_levels);
    for (int n = 0; n < n_levels; ++n) {
        const double stride = n * pan_amount / n_levels * max_disp;
        stack.levels.push_back(shift_downscale(img, stride));
    }
    return stack;
}

FusionStage identity_fusion() {
    return [](const ImageField& lr_pan, const ShiftStack&) {
        return ImageField(lr_pan.height, lr_pan.width, lr_pan.channels, 0.0f);
    };
}

FusionStage average_fusion() {
    return [](const ImageField& lr_pan, const ShiftStack& stack) {
        ImageField out(lr_pan.height, lr_pan.width, lr_pan.channels);
        const double inv = 1.0 / (stack.depth() + 1);
        for (size_t i = 0; i < out.data.size(); ++i) {
            double acc = lr_pan.data[i];
            for (const ImageField& level : stack.levels) acc += level.data[i];
            out.data[i] = static_cast<float>(acc * inv);
        }
        return out;
    };
}

ImageField fuse(const ShiftStack& stack, const ImageField& lr_pan,
                const FusionStage& stage) {
    for (const ImageField& level : stack.levels)
        if (!level.same_spatial(lr_pan))
            throw std::invalid_argument("fuse: stack level dims must match lr_pan");
    const ImageField residual = stage(lr_pan, stack);
    if (!residual.same_shape(lr_pan))
        throw std::invalid_argument("fuse: fusion stage must return a field shaped like lr_pan");
    const ImageField up_res = upscale_nearest_2x(residual);
    ImageField out = upscale_bilinear_2x(lr_pan);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += up_res.data[i];
    return out;
}

void write_stack(const std::string& path, const ShiftStack& stack) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path);
    os << stack.depth() << " " << stack.pan_amount << " " << stack.max_disp << "\n";
    for (const ImageField& level : stack.levels) {
        os.write("MNRT", 4);
        const uint32_t dims[3] = {static_cast<uint32_t>(level.height),
                                  static_cast<uint32_t>(level.width),
                                  static_cast<uint32_t>(level.channels)};
        for (uint32_t d : dims) {
            unsigned char b[4] = {static_cast<unsigned char>(d & 0xff),
                                  static_cast<unsigned char>((d >> 8) & 0xff),
                                  static_cast<unsigned char>((d >> 16) & 0xff),
                                  static_cast<unsigned char>((d >> 24) & 0xff)};
            os.write(reinterpret_cast<const char*>(b), 4);
        }
        os.write(reinterpret_cast<const char*>(level.data.data()),
                 static_cast<std::streamsize>(level.data.size() * 4));
    }
    if (!os) throw io_error("write failed: " + path);
}

ShiftStack read_stack(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open: " + path);
    std::string header;
    std::getline(is, header);
    std::istringstream hs(header);
    int n_levels = 0;
    ShiftStack stack;
    if (!(hs >> n_levels >> stack.pan_amount >> stack.max_disp) || n_levels < 1)
        throw io_error("bad stack header in " + path);
    auto u32 = [&is]() {
        unsigned char b[4];
        is.read(reinterpret_cast<char*>(b), 4);
        return static_cast<uint32_t>(b[0]) | (b[1] << 8) | (b[2] << 16) |
               (static_cast<uint32_t>(b[3]) << 24);
    };
    for (int n = 0; n < n_levels; ++n) {
        char magic[4];
        is.read(magic, 4);
        if (!is || std::memcmp(magic, "MNRT", 4) != 0)
            throw io_error("bad stack level magic in " + path);
        const uint32_t h = u32(), w = u32(), c = u32();
        if (!is || h == 0 || w == 0 || c == 0)
            throw io_error("bad stack level header in " + path);
        ImageField level(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
        is.read(reinterpret_cast<char*>(level.data.data()),
                static_cast<std::streamsize>(level.data.size() * 4));
        if (!is) throw io_error("truncated stack level in " + path);
        stack.levels.push_back(std::move(level));
    }
    return stack;
}

}  // namespace tpan
