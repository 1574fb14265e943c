#include "convtrace/synth.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "convtrace/error.hpp"
#include "convtrace/image_io.hpp"
#include "convtrace/rng.hpp"

namespace convtrace::synth {

std::string to_string(Kind kind)
{
    switch (kind) {
    case Kind::noise: return "noise";
    case Kind::smoothed_noise: return "smoothed_noise";
    case Kind::linear_upsample: return "linear_upsample";
    case Kind::transpose_conv: return "transpose_conv";
    }
    return "unknown";
}

Kind parse_kind(const std::string& name)
{
    for (Kind k : {Kind::noise, Kind::smoothed_noise, Kind::linear_upsample, Kind::transpose_conv}) {
        if (to_string(k) == name) return k;
    }
    throw ParseError("unknown synth kind '" + name + "'");
}

int label_for(Kind kind) noexcept
{
    return (kind == Kind::noise || kind == Kind::smoothed_noise) ? kLabelReal : kLabelFake;
}

Kernel4 default_transpose_kernel() noexcept
{
    constexpr std::array<double, 4> taps{0.25, 0.75, 0.75, 0.25};
    Kernel4 k{};
    for (std::size_t v = 0; v < 4; ++v) {
        for (std::size_t u = 0; u < 4; ++u) k[v * 4 + u] = taps[v] * taps[u];
    }
    return k;
}

void SynthSpec::validate() const
{
    if (width < 16 || height < 16) throw ValidationError("synth width and height must be >= 16");
    if (count < 1) throw ValidationError("synth count must be >= 1");
    if ((kind == Kind::linear_upsample || kind == Kind::transpose_conv) && (width % 2 != 0 || height % 2 != 0)) {
        throw ValidationError("upsampled kinds need even width and height");
    }
}

RgbImage gen_noise_image(std::uint64_t seed, std::size_t width, std::size_t height)
{
    Xoshiro256 rng(seed);
    RgbImage img(width, height);
    for (std::size_t c = 0; c < 3; ++c) {
        for (double& v : img.channel(c).data()) v = rng.uniform();
    }
    return img;
}

RgbImage gen_smoothed_noise_image(std::uint64_t seed, std::size_t width, std::size_t height)
{
    const RgbImage base = gen_noise_image(seed, width, height);
    // Separate stream for the re-noise.
    Xoshiro256 rng(derive_seed(seed, 1));
    RgbImage out(width, height);
    const auto w = static_cast<std::ptrdiff_t>(width);
    const auto h = static_cast<std::ptrdiff_t>(height);
    for (std::size_t c = 0; c < 3; ++c) {
        const Plane& src = base.channel(c);
        Plane& dst = out.channel(c);
        for (std::ptrdiff_t y = 0; y < h; ++y) {
            for (std::ptrdiff_t x = 0; x < w; ++x) {
                double sum = 0.0;
                for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
                    for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
                        const auto sx = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(x + dx, 0, w - 1));
                        const auto sy = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(y + dy, 0, h - 1));
                        sum += src(sx, sy);
                    }
                }
                const double noisy = sum / 9.0 + 0.05 * (2.0 * rng.uniform() - 1.0);
                dst(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = std::clamp(noisy, 0.0, 1.0);
            }
        }
    }
    return out;
}

RgbImage upsample_linear(const RgbImage& image)
{
    const std::size_t w = image.width();
    const std::size_t h = image.height();
    RgbImage out(2 * w, 2 * h);
    for (std::size_t c = 0; c < 3; ++c) {
        const Plane& src = image.channel(c);
        Plane& dst = out.channel(c);
        // Horizontal pass on even rows.
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                const double a = src(x, y);
                const double b = src(std::min(x + 1, w - 1), y);
                dst(2 * x, 2 * y) = a;
                dst(2 * x + 1, 2 * y) = 0.5 * (a + b);
            }
        }
        // Vertical pass fills odd rows from the completed even rows.
        for (std::size_t y = 0; y < h; ++y) {
            const std::size_t below = 2 * std::min(y + 1, h - 1);
            for (std::size_t x = 0; x < 2 * w; ++x) {
                dst(x, 2 * y + 1) = 0.5 * (dst(x, 2 * y) + dst(x, below));
            }
        }
    }
    return out;
}

RgbImage transpose_conv_upsample(const RgbImage& image, const Kernel4& kernel)
{
    const std::size_t w = image.width();
    const std::size_t h = image.height();
    constexpr std::ptrdiff_t kPad = 1;
    RgbImage out(2 * w, 2 * h);
    for (std::size_t c = 0; c < 3; ++c) {
        const Plane& src = image.channel(c);
        Plane& dst = out.channel(c);
        std::vector<double> acc(4 * w * h, 0.0);
        // Scatter form: input (i,j) stamps the kernel at (2i-pad, 2j-pad).
        for (std::size_t j = 0; j < h; ++j) {
            for (std::size_t i = 0; i < w; ++i) {
                const double v = src(i, j);
                if (v == 0.0) continue;
                for (std::ptrdiff_t kv = 0; kv < 4; ++kv) {
                    const std::ptrdiff_t oy = 2 * static_cast<std::ptrdiff_t>(j) - kPad + kv;
                    if (oy < 0 || oy >= static_cast<std::ptrdiff_t>(2 * h)) continue;
                    for (std::ptrdiff_t ku = 0; ku < 4; ++ku) {
                        const std::ptrdiff_t ox = 2 * static_cast<std::ptrdiff_t>(i) - kPad + ku;
                        if (ox < 0 || ox >= static_cast<std::ptrdiff_t>(2 * w)) continue;
                        acc[static_cast<std::size_t>(oy) * 2 * w + static_cast<std::size_t>(ox)] +=
                            v * kernel[static_cast<std::size_t>(kv * 4 + ku)];
                    }
                }
            }
        }
        for (std::size_t p = 0; p < acc.size(); ++p) dst.data()[p] = std::clamp(acc[p], 0.0, 1.0);
    }
    return out;
}

RgbImage generate(const SynthSpec& spec, std::size_t index)
{
    spec.validate();
    const std::uint64_t seed = spec.seed ^ static_cast<std::uint64_t>(index);
    switch (spec.kind) {
    case Kind::noise: return gen_noise_image(seed, spec.width, spec.height);
    case Kind::smoothed_noise: return gen_smoothed_noise_image(seed, spec.width, spec.height);
    case Kind::linear_upsample: return upsample_linear(gen_noise_image(seed, spec.width / 2, spec.height / 2));
    case Kind::transpose_conv:
        return transpose_conv_upsample(gen_noise_image(seed, spec.width / 2, spec.height / 2), spec.kernel);
    }
    throw ValidationError("unknown synth kind");
}

DatasetManifest gen_dataset(const std::vector<SynthSpec>& specs, const std::filesystem::path& out_dir)
{
    for (const auto& s : specs) s.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    DatasetManifest manifest;
    manifest.base_dir = out_dir;
    std::set<std::string> names;
    for (const auto& spec : specs) {
        const std::string source = spec.source.empty() ? to_string(spec.kind) : spec.source;
        for (std::size_t i = 0; i < spec.count; ++i) {
            const std::string name = source + "_" + std::to_string(spec.seed) + "_" + std::to_string(i) + ".png";
            if (!names.insert(name).second) throw ValidationError("synth specs produce duplicate file " + name);
            save_png(generate(spec, i), out_dir / name);
            manifest.entries.push_back({name, label_for(spec.kind), source, std::nullopt});
        }
    }
    return manifest;
}

DatasetManifest gen_dataset(const SynthSpec& spec, const std::filesystem::path& out_dir)
{
    return gen_dataset(std::vector<SynthSpec>{spec}, out_dir);
}

std::vector<SynthSpec> parse_spec_json(const std::string& text)
{
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("synth spec: ") + e.what());
    }
    if (doc.is_object()) doc = json::array({doc});
    if (!doc.is_array() || doc.empty()) throw ParseError("synth spec must be an object or a non-empty array");

    std::vector<SynthSpec> specs;
    for (const auto& item : doc) {
        try {
            SynthSpec s;
            s.seed = item.at("seed").get<std::uint64_t>();
            s.width = item.at("width").get<std::size_t>();
            s.height = item.at("height").get<std::size_t>();
            s.kind = parse_kind(item.at("kind").get<std::string>());
            s.count = item.at("count").get<std::size_t>();
            if (item.contains("kernel")) {
                const auto k = item.at("kernel").get<std::vector<double>>();
                if (k.size() != 16) throw ParseError("synth spec kernel must have 16 entries");
                std::copy(k.begin(), k.end(), s.kernel.begin());
            }
            if (item.contains("source")) s.source = item.at("source").get<std::string>();
            s.validate();
            specs.push_back(s);
        } catch (const json::exception& e) {
            throw ParseError(std::string("synth spec: ") + e.what());
        }
    }
    return specs;
}

}  // namespace convtrace::synth
