#include <doctest.h>

#include <random>

#include "reference.hpp"
#include "tpan/srstack.hpp"

using namespace tpan;

TEST_CASE("build_stack: zero max_disp collapses every level") {
    std::mt19937 rng(51);
    const ImageField img = ref::random_field(8, 12, 3, rng);
    const ShiftStack stack = build_stack(img, 153.0, 0.0, 8);
    const ImageField plain = downscale_bilinear_2x(img);
    for (const ImageField& level : stack.levels) CHECK(level.data == plain.data);
}

TEST_CASE("build_stack: stride schedule and sign") {
    std::mt19937 rng(52);
    const ImageField img = ref::random_field(4, 6, 1, rng);
    const ShiftStack s = build_stack(img, 153.0, 1.0, 32);
    CHECK(s.stride(0) == 0.0);
    CHECK(s.stride(1) == doctest::Approx(4.78125).epsilon(1e-12));
    CHECK(s.stride(31) == doctest::Approx(148.21875).epsilon(1e-12));
    for (int n = 0; n < 32; ++n)
        CHECK(s.stride(n) == doctest::Approx(n * s.stride(1)).epsilon(1e-12));

    const ShiftStack neg = build_stack(img, -153.0, 1.0, 4);
    CHECK(neg.stride(1) == doctest::Approx(-4.78125 * 8.0).epsilon(1e-12));
    for (int n = 1; n < 4; ++n) CHECK(neg.stride(n) < 0.0);
}

TEST_CASE("build_stack: level 0 bit-equals the plain downscale") {
    std::mt19937 rng(53);
    const ImageField img = ref::random_field(10, 14, 3, rng);
    const ShiftStack s = build_stack(img, -97.0, 0.63, 5);
    CHECK(s.levels[0].data == downscale_bilinear_2x(img).data);
}

TEST_CASE("build_stack matches the scalar sampling reference") {
    std::mt19937 rng(54);
    const ImageField img = ref::random_field(8, 10, 2, rng);
    const ShiftStack s = build_stack(img, 31.0, 0.8, 6);
    for (int n = 0; n < 6; ++n) {
        const double stride = n * 31.0 / 6.0 * 0.8;
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 5; ++x)
                for (int c = 0; c < 2; ++c)
                    CHECK(s.levels[n].at(y, x, c) ==
                          doctest::Approx(ref::shift_downscale_at(img, stride, y, x, c))
                              .epsilon(1e-5));
    }
}

TEST_CASE("build_stack rejects odd dims and empty stacks") {
    ImageField odd(7, 8, 1);
    CHECK_THROWS_AS(build_stack(odd, 153.0, 0.5, 4), std::invalid_argument);
    ImageField ok(8, 8, 1);
    CHECK_THROWS_AS(build_stack(ok, 153.0, 0.5, 0), std::invalid_argument);
}

TEST_CASE("fuse with the identity stage is exactly the bilinear upscale") {
    std::mt19937 rng(55);
    const ImageField img = ref::random_field(8, 12, 3, rng);
    const ShiftStack stack = build_stack(img, 153.0, 0.4, 4);
    const ImageField lr_pan = ref::random_field(4, 6, 3, rng);
    const ImageField fused = fuse(stack, lr_pan, identity_fusion());
    const ImageField up = upscale_bilinear_2x(lr_pan);
    CHECK(fused.data == up.data);
}

TEST_CASE("fuse keeps constants constant") {
    ImageField img(8, 8, 2, 0.42f);
    const ShiftStack stack = build_stack(img, 153.0, 0.7, 3);
    ImageField lr_pan(4, 4, 2, 0.42f);
    const ImageField fused = fuse(stack, lr_pan, average_fusion());
    // residual adds the constant average on top of the constant upscale
    for (float v : fused.data) CHECK(v == doctest::Approx(2 * 0.42f).epsilon(1e-6));
}

TEST_CASE("fuse with the averaging stage matches a scalar reference") {
    std::mt19937 rng(56);
    const ImageField img = ref::random_field(8, 10, 2, rng);
    const ShiftStack stack = build_stack(img, 41.0, 0.9, 3);
    const ImageField lr_pan = ref::random_field(4, 5, 2, rng);
    const ImageField fused = fuse(stack, lr_pan, average_fusion());
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 10; ++x)
            for (int c = 0; c < 2; ++c) {
                // nearest upscale of the average of the four LR sources
                double avg = lr_pan.at(y / 2, x / 2, c);
                for (const ImageField& level : stack.levels)
                    avg += level.at(y / 2, x / 2, c);
                avg /= stack.depth() + 1;
                // bilinear upscale of lr_pan at pixel-center alignment
                auto clampd = [](double v, double hi) {
                    return v < 0.0 ? 0.0 : (v > hi ? hi : v);
                };
                const double sy = clampd((y - 0.5) / 2.0, lr_pan.height - 1);
                const double sx = clampd((x - 0.5) / 2.0, lr_pan.width - 1);
                const int y0 = static_cast<int>(std::floor(sy));
                const int x0 = static_cast<int>(std::floor(sx));
                const int y1 = std::min(y0 + 1, lr_pan.height - 1);
                const int x1 = std::min(x0 + 1, lr_pan.width - 1);
                const double fy = sy - y0, fx = sx - x0;
                const double up =
                    (1 - fy) * ((1 - fx) * lr_pan.at(y0, x0, c) + fx * lr_pan.at(y0, x1, c)) +
                    fy * ((1 - fx) * lr_pan.at(y1, x0, c) + fx * lr_pan.at(y1, x1, c));
                CHECK(fused.at(y, x, c) == doctest::Approx(avg + up).epsilon(1e-5));
            }
}

TEST_CASE("fuse validates shapes") {
    ImageField img(8, 8, 1);
    const ShiftStack stack = build_stack(img, 153.0, 0.5, 2);
    ImageField wrong(3, 4, 1);
    CHECK_THROWS_AS(fuse(stack, wrong, identity_fusion()), std::invalid_argument);
}

TEST_CASE("stack serialization round trip") {
    std::mt19937 rng(57);
    const ImageField img = ref::random_field(6, 8, 3, rng);
    const ShiftStack s = build_stack(img, -153.0, 0.77, 5);
    const std::string path = "/tmp/tpan_test_stack.bin";
    write_stack(path, s);
    const ShiftStack back = read_stack(path);
    CHECK(back.depth() == 5);
    CHECK(back.pan_amount == doctest::Approx(-153.0));
    CHECK(back.max_disp == doctest::Approx(0.77));
    for (int n = 0; n < 5; ++n) CHECK(back.levels[n].data == s.levels[n].data);
}
