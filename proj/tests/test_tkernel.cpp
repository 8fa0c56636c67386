#include <doctest.h>

#include <random>

#include "reference.hpp"
#include "tpan/gradcheck.hpp"
#include "tpan/tkernel.hpp"

using namespace tpan;

namespace {

PanSpec default_spec(double pan = 153.0) {
    PanSpec s;
    s.pan_amount = pan;
    return s;
}

ImageField delta_kernels(int h, int w, const KernelLayout& layout = {}) {
    ImageField k(h, w, layout.channels(), 0.0f);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) k.at(y, x, 0) = 1.0f;
    return k;
}

}  // namespace

TEST_CASE("dilation schedule for the reference pan amounts") {
    PanSpec s = default_spec(153.0);
    CHECK(s.global_dilation() == doctest::Approx(4.78125).epsilon(1e-12));
    const auto d = s.dilation_schedule();
    REQUIRE(d.size() == 3);
    CHECK(d[0] == doctest::Approx(4.78125).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(3.1875).epsilon(1e-12));
    CHECK(d[2] == doctest::Approx(1.59375).epsilon(1e-12));

    s.pan_amount = -153.0;
    const auto dn = s.dilation_schedule();
    CHECK(dn[0] == doctest::Approx(-4.78125));
    CHECK(dn[1] == doctest::Approx(-3.1875));
    CHECK(dn[2] == doctest::Approx(-1.59375));

    s.pan_amount = 153.0 * 22.0 / 54.0;
    const auto ds = s.dilation_schedule();
    CHECK(ds[0] == doctest::Approx(1.9479166666666667).epsilon(1e-9));
    CHECK(ds[1] == doctest::Approx(1.2986111111111112).epsilon(1e-9));
    CHECK(ds[2] == doctest::Approx(0.6493055555555556).epsilon(1e-9));

    s.pan_amount = 0.0;
    CHECK_THROWS_AS(s.dilation_schedule(), std::invalid_argument);
}

TEST_CASE("asymmetric dilation rule divides by the short wing leftward") {
    PanSpec s = default_spec(-153.0);
    s.asymmetric_dilation_rule = true;
    CHECK(s.global_dilation() == doctest::Approx(-153.0 / 16.0));
    s.pan_amount = 153.0;
    CHECK(s.global_dilation() == doctest::Approx(153.0 / 32.0));
}

TEST_CASE("tconv_forward: delta kernel is the identity for any dilation") {
    std::mt19937 rng(21);
    const ImageField img = ref::random_field(5, 9, 3, rng);
    const ImageField k = delta_kernels(5, 9);
    for (double d : {0.25, 1.0, -4.78125}) {
        const ImageField out = tconv_forward(img, k, {}, d);
        CHECK(out.data == img.data);
    }
}

TEST_CASE("tconv_forward: constant image scales by the kernel channel sum") {
    std::mt19937 rng(22);
    ImageField img(4, 7, 2, 0.6f);
    ImageField k = ref::random_field(4, 7, KernelLayout{}.channels(), rng);
    const ImageField out = tconv_forward(img, k, {}, 2.5);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 7; ++x) {
            double s = 0.0;
            for (int c = 0; c < k.channels; ++c) s += k.at(y, x, c);
            for (int c = 0; c < 2; ++c)
                CHECK(out.at(y, x, c) == doctest::Approx(s * 0.6).epsilon(1e-5));
        }
}

TEST_CASE("tconv_forward: single long-wing tap samples by hand-checked lerp") {
    ImageField img(1, 8, 1);
    for (int x = 0; x < 8; ++x) img.at(0, x, 0) = static_cast<float>(x);
    ImageField k(1, 8, KernelLayout{}.channels(), 0.0f);
    KernelLayout layout;
    k.at(0, 2, layout.long_begin()) = 1.0f;  // first long tap at x=2
    const ImageField out = tconv_forward(img, k, layout, 2.5);
    CHECK(out.at(0, 2, 0) == doctest::Approx(4.5));
}

TEST_CASE("tconv shape and dilation errors") {
    ImageField img(4, 4, 1);
    ImageField k(4, 5, KernelLayout{}.channels());
    CHECK_THROWS_AS(tconv_forward(img, k, {}, 1.0), std::invalid_argument);
    ImageField k2(4, 4, 80);
    CHECK_THROWS_AS(tconv_forward(img, k2, {}, 1.0), std::invalid_argument);
    ImageField k3(4, 4, KernelLayout{}.channels());
    CHECK_THROWS_AS(tconv_forward(img, k3, {}, 0.0), std::invalid_argument);
}

TEST_CASE("blend_forward: one-hot weights reduce to a single dilation") {
    std::mt19937 rng(31);
    const ImageField img = ref::random_field(6, 10, 3, rng);
    ImageField k = ref::random_field(6, 10, KernelLayout{}.channels(), rng);
    ref::normalize_channels(k);
    const PanSpec s = default_spec(153.0);
    ImageField w(6, 10, 3, 0.0f);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 10; ++x) w.at(y, x, 0) = 1.0f;
    const ImageField blended = blend_forward(img, k, w, s);
    const ImageField single = tconv_forward(img, k, s.layout, s.dilation_schedule()[0]);
    for (size_t i = 0; i < blended.data.size(); ++i)
        CHECK(blended.data[i] == doctest::Approx(single.data[i]).epsilon(1e-6));
}

TEST_CASE("blend_forward: identity kernels blend back to the input") {
    std::mt19937 rng(32);
    const ImageField img = ref::random_field(6, 8, 3, rng);
    const ImageField k = delta_kernels(6, 8);
    ImageField w(6, 8, 3, 1.0f / 3.0f);
    const ImageField out = blend_forward(img, k, w, default_spec(153.0));
    for (size_t i = 0; i < out.data.size(); ++i)
        CHECK(out.data[i] == doctest::Approx(img.data[i]).epsilon(1e-6));
}

TEST_CASE("blend_forward matches the scalar per-tap reference") {
    std::mt19937 rng(33);
    const ImageField img = ref::random_field(8, 12, 3, rng);
    ImageField k = ref::random_field(8, 12, KernelLayout{}.channels(), rng);
    ImageField w = ref::random_field(8, 12, 3, rng);
    ref::normalize_channels(k);
    ref::normalize_channels(w);
    const PanSpec s = default_spec(153.0);
    const ImageField out = blend_forward(img, k, w, s);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 12; ++x)
            for (int c = 0; c < 3; ++c)
                CHECK(out.at(y, x, c) ==
                      doctest::Approx(ref::blend_forward_at(img, k, w, s, y, x, c))
                          .epsilon(1e-5));
}

TEST_CASE("convexity: simplex kernels and weights stay inside input range") {
    std::mt19937 rng(34);
    for (int trial = 0; trial < 20; ++trial) {
        const ImageField img = ref::random_field(5, 7, 2, rng, -1.0f, 2.0f);
        ImageField k = ref::random_field(5, 7, KernelLayout{}.channels(), rng);
        ImageField w = ref::random_field(5, 7, 3, rng);
        ref::normalize_channels(k);
        ref::normalize_channels(w);
        const ImageField out = blend_forward(img, k, w, default_spec(97.0));
        for (int c = 0; c < 2; ++c) {
            float lo = 1e9f, hi = -1e9f;
            for (int y = 0; y < 5; ++y)
                for (int x = 0; x < 7; ++x) {
                    lo = std::min(lo, img.at(y, x, c));
                    hi = std::max(hi, img.at(y, x, c));
                }
            for (int y = 0; y < 5; ++y)
                for (int x = 0; x < 7; ++x) {
                    CHECK(out.at(y, x, c) >= lo - 1e-5f);
                    CHECK(out.at(y, x, c) <= hi + 1e-5f);
                }
        }
    }
}

TEST_CASE("linearity in the kernel field") {
    std::mt19937 rng(35);
    const ImageField img = ref::random_field(5, 8, 2, rng);
    const ImageField k1 = ref::random_field(5, 8, KernelLayout{}.channels(), rng);
    const ImageField k2 = ref::random_field(5, 8, KernelLayout{}.channels(), rng);
    ImageField w = ref::random_field(5, 8, 3, rng);
    ref::normalize_channels(w);
    const PanSpec s = default_spec(60.0);
    const double a = 0.7, b = -1.3;
    ImageField mix(5, 8, k1.channels);
    for (size_t i = 0; i < mix.data.size(); ++i)
        mix.data[i] = static_cast<float>(a * k1.data[i] + b * k2.data[i]);
    const ImageField lhs = blend_forward(img, mix, w, s);
    const ImageField r1 = blend_forward(img, k1, w, s);
    const ImageField r2 = blend_forward(img, k2, w, s);
    for (size_t i = 0; i < lhs.data.size(); ++i)
        CHECK(lhs.data[i] ==
              doctest::Approx(a * r1.data[i] + b * r2.data[i]).epsilon(2e-5));
}

TEST_CASE("mirror symmetry under pan negation") {
    std::mt19937 rng(36);
    const ImageField img = ref::random_field(6, 9, 3, rng);
    ImageField k = ref::random_field(6, 9, KernelLayout{}.channels(), rng);
    ImageField w = ref::random_field(6, 9, 3, rng);
    ref::normalize_channels(k);
    ref::normalize_channels(w);
    PanSpec s = default_spec(41.0);
    const ImageField out = blend_forward(img, k, w, s);

    PanSpec neg = s;
    neg.pan_amount = -s.pan_amount;
    const ImageField mirrored =
        blend_forward(mirror_h(img), mirror_h(k), mirror_h(w), neg);
    const ImageField back = mirror_h(mirrored);
    for (size_t i = 0; i < out.data.size(); ++i)
        CHECK(back.data[i] == doctest::Approx(out.data[i]).epsilon(1e-6));
}

TEST_CASE("exact shift recovery for integer-aligned one-hot taps") {
    // pan 64 with long wing 32 gives g_d = 2; tap 4 encodes an 8px shift
    std::mt19937 rng(37);
    const ImageField img = ref::random_field(4, 24, 1, rng);
    const PanSpec s = default_spec(64.0);
    const int tap = 4;
    const int shift = 8;
    ImageField k(4, 24, s.layout.channels(), 0.0f);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 24; ++x)
            k.at(y, x, s.layout.long_begin() + tap - 1) = 1.0f;
    ImageField w(4, 24, 3, 0.0f);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 24; ++x) w.at(y, x, 0) = 1.0f;
    const ImageField out = blend_forward(img, k, w, s);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 24 - shift; ++x)
            CHECK(out.at(y, x, 0) == img.at(y, x + shift, 0));
}

TEST_CASE("tconv_backward: zero upstream grad gives zero gradients") {
    std::mt19937 rng(41);
    const ImageField img = ref::random_field(5, 7, 2, rng);
    const ImageField k = ref::random_field(5, 7, KernelLayout{}.channels(), rng);
    const ImageField zero(5, 7, 2, 0.0f);
    const TconvGrads g = tconv_backward(img, k, {}, 2.5, zero);
    for (float v : g.kernels.data) CHECK(v == 0.0f);
    for (float v : g.image.data) CHECK(v == 0.0f);
}

TEST_CASE("tconv_backward conserves scattered mass on constant images") {
    std::mt19937 rng(42);
    ImageField img(5, 7, 1, 1.0f);
    const ImageField k = ref::random_field(5, 7, KernelLayout{}.channels(), rng);
    const ImageField go = ref::random_field(5, 7, 1, rng);
    const TconvGrads g = tconv_backward(img, k, {}, 1.7, go);
    double scattered = 0.0;
    for (float v : g.image.data) scattered += v;
    double expect = 0.0;
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 7; ++x) {
            double ks = 0.0;
            for (int c = 0; c < k.channels; ++c) ks += k.at(y, x, c);
            expect += static_cast<double>(go.at(y, x, 0)) * ks;
        }
    CHECK(scattered == doctest::Approx(expect).epsilon(1e-4));
}

TEST_CASE("blend_backward: one-hot weights reduce to tconv_backward") {
    std::mt19937 rng(43);
    const ImageField img = ref::random_field(5, 8, 2, rng);
    ImageField k = ref::random_field(5, 8, KernelLayout{}.channels(), rng);
    ref::normalize_channels(k);
    const PanSpec s = default_spec(37.0);
    ImageField w(5, 8, 3, 0.0f);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 8; ++x) w.at(y, x, 0) = 1.0f;
    const ImageField go = ref::random_field(5, 8, 2, rng, -1.0f, 1.0f);
    const BlendGrads bg = blend_backward(img, k, w, s, go);
    const TconvGrads tg = tconv_backward(img, k, s.layout, s.dilation_schedule()[0], go);
    for (size_t i = 0; i < bg.kernels.data.size(); ++i)
        CHECK(bg.kernels.data[i] == doctest::Approx(tg.kernels.data[i]).epsilon(1e-5));
    for (size_t i = 0; i < bg.image.data.size(); ++i)
        CHECK(bg.image.data[i] ==
              doctest::Approx(tg.image.data[i]).epsilon(1e-5).scale(1.0));
}

TEST_CASE("blend_backward: zero grad_out zeroes all three gradient groups") {
    std::mt19937 rng(44);
    const ImageField img = ref::random_field(4, 6, 2, rng);
    ImageField k = ref::random_field(4, 6, KernelLayout{}.channels(), rng);
    ImageField w = ref::random_field(4, 6, 3, rng);
    ref::normalize_channels(k);
    ref::normalize_channels(w);
    const ImageField zero(4, 6, 2, 0.0f);
    const BlendGrads g = blend_backward(img, k, w, default_spec(29.0), zero);
    for (float v : g.kernels.data) CHECK(v == 0.0f);
    for (float v : g.weights.data) CHECK(v == 0.0f);
    for (float v : g.image.data) CHECK(v == 0.0f);
}

TEST_CASE("finite differences confirm all gradient groups on a 6x9 instance") {
    PanSpec s = default_spec(21.0);
    const GradCheckReport rep = check_blend_gradients(6, 9, 0, s);
    CHECK(rep.max_err_kernels < 1e-4);
    CHECK(rep.max_err_weights < 1e-4);
    CHECK(rep.max_err_image < 1e-4);
}
