#include <doctest.h>

#include <cmath>

#include "convtrace/em.hpp"
#include "convtrace/error.hpp"
#include "convtrace/image_io.hpp"
#include "convtrace/synth.hpp"
#include "temp_dir.hpp"

using namespace convtrace;
using namespace convtrace::synth;

namespace {

// Zero-residual predictor for interpolated sites of 2x linear upsampling.
const std::vector<double> kInterpKernel{-0.25, 0.5, -0.25, 0.5, 0.5, -0.25, 0.5, -0.25};

bool is_copied(std::size_t x, std::size_t y) { return x % 2 == 0 && y % 2 == 0; }

}  // namespace

TEST_CASE("noise is deterministic and seed dependent")
{
    const RgbImage a = gen_noise_image(7, 16, 16);
    const RgbImage b = gen_noise_image(7, 16, 16);
    const RgbImage c = gen_noise_image(8, 16, 16);
    CHECK(a.r == b.r);
    CHECK(a.b == b.b);
    CHECK(a.width() == 16);
    CHECK(a.height() == 16);
    std::size_t differ = 0, total = 0;
    for (std::size_t ch = 0; ch < 3; ++ch) {
        for (std::size_t i = 0; i < 256; ++i) {
            differ += a.channel(ch).data()[i] != c.channel(ch).data()[i];
            ++total;
        }
    }
    CHECK(static_cast<double>(differ) >= 0.99 * static_cast<double>(total));
}

TEST_CASE("noise mean and range")
{
    const RgbImage img = gen_noise_image(3, 128, 128);
    double sum = 0.0;
    for (double v : img.g.data()) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
        sum += v;
    }
    // 16384 uniforms: standard error of the mean ~0.0023.
    CHECK(std::abs(sum / 16384.0 - 0.5) < 0.012);
}

TEST_CASE("smoothed noise stays in range and is correlated")
{
    const RgbImage img = gen_smoothed_noise_image(4, 64, 64);
    double num = 0.0, den = 0.0, mean = 0.0;
    for (double v : img.r.data()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        mean += v;
    }
    mean /= 4096.0;
    for (std::size_t y = 0; y < 64; ++y) {
        for (std::size_t x = 0; x + 1 < 64; ++x) {
            num += (img.r(x, y) - mean) * (img.r(x + 1, y) - mean);
            den += (img.r(x, y) - mean) * (img.r(x, y) - mean);
        }
    }
    // A 3x3 box gives lag-1 correlation 2/3 before re-noising.
    CHECK(num / den > 0.5);
    CHECK(gen_smoothed_noise_image(4, 64, 64).r == img.r);
}

TEST_CASE("linear upsampling of a 1D slice")
{
    const RgbImage src(Plane(2, 1, std::vector<double>{0.2, 0.6}), Plane(2, 1), Plane(2, 1));
    const RgbImage up = upsample_linear(src);
    REQUIRE(up.width() == 4);
    REQUIRE(up.height() == 2);
    CHECK(up.r(0, 0) == 0.2);
    CHECK(up.r(1, 0) == doctest::Approx(0.4));
    CHECK(up.r(2, 0) == 0.6);
}

TEST_CASE("linear upsampling keeps the even lattice and interpolates exactly")
{
    const RgbImage src = gen_noise_image(9, 20, 18);
    const RgbImage up = upsample_linear(src);
    REQUIRE(up.width() == 40);
    REQUIRE(up.height() == 36);
    for (std::size_t y = 0; y < 18; ++y)
        for (std::size_t x = 0; x < 20; ++x) CHECK(up.g(2 * x, 2 * y) == src.g(x, y));

    // Interpolated sites away from the last row and column have zero residual
    // under the fixed kernel; copied sites do not.
    const em::ResidualMap r = em::residual_map(up.g, kInterpKernel);
    std::size_t interp = 0, exact = 0, copied_nonzero = 0, copied = 0;
    for (std::size_t y = 1; y + 2 < 36; ++y) {
        for (std::size_t x = 1; x + 2 < 40; ++x) {
            const double res = r(x - 1, y - 1);
            if (is_copied(x, y)) {
                ++copied;
                copied_nonzero += res > 1e-9;
            } else {
                ++interp;
                exact += res < 1e-12;
            }
        }
    }
    CHECK(exact == interp);
    CHECK(static_cast<double>(interp) / static_cast<double>(interp + copied) == doctest::Approx(0.75).epsilon(0.02));
    CHECK(copied_nonzero == copied);
}

TEST_CASE("EM on upsampled noise separates the lattice")
{
    const RgbImage up = upsample_linear(gen_noise_image(12, 32, 32));
    const em::EmResult res = em::run_em(up.r, em::EmConfig{});
    CHECK(res.kernel.converged);
    double interp = 0.0, copied = 0.0;
    std::size_t ni = 0, nc = 0;
    for (std::size_t y = 1; y + 1 < 64; ++y) {
        for (std::size_t x = 1; x + 1 < 64; ++x) {
            const double w = res.posterior(x - 1, y - 1);
            if (is_copied(x, y)) {
                copied += w;
                ++nc;
            } else {
                interp += w;
                ++ni;
            }
        }
    }
    CHECK(interp / static_cast<double>(ni) > 0.9);
    CHECK(copied / static_cast<double>(nc) < 0.5);
}

TEST_CASE("transpose convolution stamps the kernel")
{
    Kernel4 k{};
    for (std::size_t i = 0; i < 16; ++i) k[i] = 0.01 * static_cast<double>(i + 1);
    RgbImage delta(8, 8);
    delta.r(3, 2) = 1.0;
    const RgbImage out = transpose_conv_upsample(delta, k);
    REQUIRE(out.width() == 16);
    for (std::size_t y = 0; y < 16; ++y) {
        for (std::size_t x = 0; x < 16; ++x) {
            const auto u = static_cast<std::ptrdiff_t>(x) - (2 * 3 - 1);
            const auto v = static_cast<std::ptrdiff_t>(y) - (2 * 2 - 1);
            const bool inside = u >= 0 && u < 4 && v >= 0 && v < 4;
            const double expect = inside ? k[static_cast<std::size_t>(v * 4 + u)] : 0.0;
            CHECK(out.r(x, y) == expect);
        }
    }
    const RgbImage zero = transpose_conv_upsample(RgbImage(8, 8));
    for (double v : zero.g.data()) CHECK(v == 0.0);
}

TEST_CASE("transpose convolution is homogeneous before clipping")
{
    const RgbImage x = gen_noise_image(13, 16, 16);
    RgbImage half = x;
    for (std::size_t c = 0; c < 3; ++c)
        for (double& v : half.channel(c).data()) v *= 0.5;
    const RgbImage fx = transpose_conv_upsample(x);
    const RgbImage fh = transpose_conv_upsample(half);
    for (std::size_t i = 0; i < fx.r.data().size(); ++i) {
        if (fx.r.data()[i] < 1.0) CHECK(fh.r.data()[i] == doctest::Approx(0.5 * fx.r.data()[i]).epsilon(1e-14));
    }
}

TEST_CASE("spec validation and kinds")
{
    SynthSpec s;
    s.width = 15;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = {};
    s.count = 0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = {};
    s.kind = Kind::transpose_conv;
    s.width = 33;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    CHECK(label_for(Kind::noise) == 0);
    CHECK(label_for(Kind::smoothed_noise) == 0);
    CHECK(label_for(Kind::linear_upsample) == 1);
    CHECK(label_for(Kind::transpose_conv) == 1);
    for (Kind k : {Kind::noise, Kind::smoothed_noise, Kind::linear_upsample, Kind::transpose_conv})
        CHECK(parse_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_kind("gan"), ParseError);
}

TEST_CASE("spec JSON")
{
    const auto one = parse_spec_json(R"({"seed": 5, "width": 32, "height": 16, "kind": "noise", "count": 2})");
    REQUIRE(one.size() == 1);
    CHECK(one[0].seed == 5);
    CHECK(one[0].height == 16);
    const auto many = parse_spec_json(R"([{"seed":1,"width":32,"height":32,"kind":"transpose_conv","count":1,
        "source":"tc","kernel":[0,0,0,0, 0,1,0,0, 0,0,0,0, 0,0,0,0]}])");
    CHECK(many.at(0).source == "tc");
    CHECK(many.at(0).kernel[5] == 1.0);
    CHECK_THROWS_AS(parse_spec_json("{"), ParseError);
    CHECK_THROWS_AS(parse_spec_json(R"({"seed":1})"), ParseError);
    CHECK_THROWS_AS(parse_spec_json(R"({"seed":1,"width":32,"height":32,"kind":"x","count":1})"), ParseError);
}

TEST_CASE("datasets are reproducible and labelled by kind")
{
    testing::TempDir d1, d2;
    SynthSpec real{21, 32, 32, Kind::smoothed_noise, 3, default_transpose_kernel(), "real"};
    SynthSpec fake{22, 32, 32, Kind::transpose_conv, 2, default_transpose_kernel(), ""};
    const auto m1 = gen_dataset({real, fake}, d1.path());
    const auto m2 = gen_dataset({real, fake}, d2.path());
    REQUIRE(m1.entries.size() == 5);
    CHECK(m1.entries == m2.entries);
    CHECK(m1.entries[0].label == 0);
    CHECK(m1.entries[4].label == 1);
    CHECK(m1.entries[4].source == "transpose_conv");
    for (const auto& e : m1.entries) {
        CHECK(read_file_bytes(d1.path() / e.path) == read_file_bytes(d2.path() / e.path));
    }
    const RgbImage first = load_image(d1.path() / m1.entries[0].path);
    const RgbImage expect = generate(real, 0);
    CHECK(first.r == quantize_8bit(expect).r);
}
