#include "convtrace/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "convtrace/error.hpp"
#include "convtrace/image_io.hpp"
#include "convtrace/rng.hpp"
#include "text_util.hpp"

namespace convtrace::attacks {
namespace {

std::ptrdiff_t reflect101(std::ptrdiff_t i, std::ptrdiff_t n)
{
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

double sample_bilinear(const Plane& p, double x, double y)
{
    const double maxx = static_cast<double>(p.width() - 1);
    const double maxy = static_cast<double>(p.height() - 1);
    x = std::clamp(x, 0.0, maxx);
    y = std::clamp(y, 0.0, maxy);
    const auto x0 = static_cast<std::size_t>(std::floor(x));
    const auto y0 = static_cast<std::size_t>(std::floor(y));
    const std::size_t x1 = std::min(x0 + 1, p.width() - 1);
    const std::size_t y1 = std::min(y0 + 1, p.height() - 1);
    const double fx = x - static_cast<double>(x0);
    const double fy = y - static_cast<double>(y0);
    const double top = p(x0, y0) * (1.0 - fx) + p(x1, y0) * fx;
    const double bottom = p(x0, y1) * (1.0 - fx) + p(x1, y1) * fx;
    return std::clamp(top * (1.0 - fy) + bottom * fy, 0.0, 1.0);
}

void require_nonempty(const RgbImage& image)
{
    if (image.empty()) throw DimensionError("attack on an empty image");
}

}  // namespace

std::string AttackSpec::token() const
{
    switch (kind) {
    case Kind::random_square: return "random-square";
    case Kind::gaussian_blur: return "blur:" + std::to_string(param);
    case Kind::rotate: return "rotate:" + std::to_string(param);
    case Kind::scale: return std::string("scale:") + (param > 0 ? "+" : "") + std::to_string(param);
    case Kind::jpeg: return "jpeg:" + std::to_string(param);
    }
    return "unknown";
}

void AttackSpec::validate() const
{
    auto one_of = [&](std::initializer_list<int> allowed) {
        if (std::find(allowed.begin(), allowed.end(), param) == allowed.end()) {
            throw UsageError("invalid parameter " + std::to_string(param) + " for attack " + token());
        }
    };
    switch (kind) {
    case Kind::random_square: break;
    case Kind::gaussian_blur: one_of({3, 9, 15}); break;
    case Kind::rotate: one_of({45, 90, 180}); break;
    case Kind::scale: one_of({50, -50}); break;
    case Kind::jpeg: one_of({50}); break;
    }
}

AttackSpec AttackSpec::parse(const std::string& token, std::uint64_t seed)
{
    if (token == "random-square" || token == "random_square") return {Kind::random_square, 0, seed};
    const auto colon = token.find(':');
    if (colon == std::string::npos) throw UsageError("invalid attack token '" + token + "'");
    const std::string name = token.substr(0, colon);
    std::string value = token.substr(colon + 1);
    if (!value.empty() && value.front() == '+') value.erase(0, 1);
    const auto v = detail::parse_int(value);
    if (!v || value.empty()) throw UsageError("invalid attack token '" + token + "'");

    AttackSpec spec{Kind::random_square, static_cast<int>(*v), seed};
    if (name == "blur") spec.kind = Kind::gaussian_blur;
    else if (name == "rotate") spec.kind = Kind::rotate;
    else if (name == "scale") spec.kind = Kind::scale;
    else if (name == "jpeg") spec.kind = Kind::jpeg;
    else throw UsageError("invalid attack token '" + token + "'");
    spec.validate();
    return spec;
}

RgbImage random_square(const RgbImage& image, std::uint64_t seed)
{
    require_nonempty(image);
    Xoshiro256 rng(seed);
    const std::size_t m = std::min(image.width(), image.height());
    const auto lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(m))));
    const auto hi = std::max(lo, static_cast<std::size_t>(std::floor(0.5 * static_cast<double>(m))));
    const std::size_t sw = lo + rng.below(hi - lo + 1);
    const std::size_t sh = lo + rng.below(hi - lo + 1);
    const std::size_t x0 = rng.below(image.width() - sw + 1);
    const std::size_t y0 = rng.below(image.height() - sh + 1);
    const double color[3] = {rng.uniform(), rng.uniform(), rng.uniform()};

    RgbImage out = image;
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t y = y0; y < y0 + sh; ++y) {
            for (std::size_t x = x0; x < x0 + sw; ++x) out.channel(c)(x, y) = color[c];
        }
    }
    return out;
}

double blur_sigma(int ksize) noexcept { return 0.3 * ((ksize - 1) * 0.5 - 1.0) + 0.8; }

RgbImage gaussian_blur(const RgbImage& image, int ksize)
{
    require_nonempty(image);
    if (ksize < 1 || ksize % 2 == 0) throw ValidationError("blur kernel size must be odd and positive");
    const double sigma = blur_sigma(ksize);
    const int radius = ksize / 2;
    std::vector<double> taps(static_cast<std::size_t>(ksize));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
        taps[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& t : taps) t /= sum;

    const auto w = static_cast<std::ptrdiff_t>(image.width());
    const auto h = static_cast<std::ptrdiff_t>(image.height());
    RgbImage out(image.width(), image.height());
    std::vector<double> tmp(image.width() * image.height());
    for (std::size_t c = 0; c < 3; ++c) {
        const Plane& src = image.channel(c);
        for (std::ptrdiff_t y = 0; y < h; ++y) {
            for (std::ptrdiff_t x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    acc += taps[static_cast<std::size_t>(i + radius)] *
                           src(static_cast<std::size_t>(reflect101(x + i, w)), static_cast<std::size_t>(y));
                }
                tmp[static_cast<std::size_t>(y * w + x)] = acc;
            }
        }
        Plane& dst = out.channel(c);
        for (std::ptrdiff_t y = 0; y < h; ++y) {
            for (std::ptrdiff_t x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    acc += taps[static_cast<std::size_t>(i + radius)] * tmp[static_cast<std::size_t>(reflect101(y + i, h) * w + x)];
                }
                dst(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = std::clamp(acc, 0.0, 1.0);
            }
        }
    }
    return out;
}

RgbImage rotate90(const RgbImage& image)
{
    require_nonempty(image);
    const std::size_t w = image.width();
    const std::size_t h = image.height();
    RgbImage out(h, w);
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) out.channel(c)(y, w - 1 - x) = image.channel(c)(x, y);
        }
    }
    return out;
}

RgbImage rotate180(const RgbImage& image)
{
    require_nonempty(image);
    const std::size_t w = image.width();
    const std::size_t h = image.height();
    RgbImage out(w, h);
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) out.channel(c)(w - 1 - x, h - 1 - y) = image.channel(c)(x, y);
        }
    }
    return out;
}

RgbImage rotate45(const RgbImage& image)
{
    require_nonempty(image);
    // The largest axis-aligned rectangle inside a W x H frame turned by 45
    // degrees is a square of side min(W,H)/sqrt(2).
    const double short_side = static_cast<double>(std::min(image.width(), image.height()));
    const auto side = static_cast<std::size_t>(std::floor(short_side / std::numbers::sqrt2));
    if (side < 8) throw DimensionError("image too small for a 45 degree rotation crop");

    const double cx = 0.5 * static_cast<double>(image.width() - 1);
    const double cy = 0.5 * static_cast<double>(image.height() - 1);
    const double co = 0.5 * static_cast<double>(side - 1);
    const double s = std::numbers::sqrt2 / 2.0;  // sin 45 = cos 45
    RgbImage out(side, side);
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t j = 0; j < side; ++j) {
            for (std::size_t i = 0; i < side; ++i) {
                const double u = static_cast<double>(i) - co;
                const double v = static_cast<double>(j) - co;
                // Counter-clockwise on screen (y down): inverse map rotates the other way.
                const double sx = cx + s * u - s * v;
                const double sy = cy + s * u + s * v;
                out.channel(c)(i, j) = sample_bilinear(image.channel(c), sx, sy);
            }
        }
    }
    return out;
}

RgbImage resize_bilinear(const RgbImage& image, std::size_t width, std::size_t height)
{
    require_nonempty(image);
    if (width == 0 || height == 0) throw DimensionError("resize to an empty image");
    const double fx = static_cast<double>(image.width()) / static_cast<double>(width);
    const double fy = static_cast<double>(image.height()) / static_cast<double>(height);
    RgbImage out(width, height);
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t y = 0; y < height; ++y) {
            const double sy = (static_cast<double>(y) + 0.5) * fy - 0.5;
            for (std::size_t x = 0; x < width; ++x) {
                const double sx = (static_cast<double>(x) + 0.5) * fx - 0.5;
                out.channel(c)(x, y) = sample_bilinear(image.channel(c), sx, sy);
            }
        }
    }
    return out;
}

RgbImage jpeg_roundtrip(const RgbImage& image, int quality)
{
    require_nonempty(image);
    return decode_jpeg(encode_jpeg(image, quality));
}

RgbImage apply_attack(const RgbImage& image, const AttackSpec& spec)
{
    spec.validate();
    switch (spec.kind) {
    case Kind::random_square: return random_square(image, spec.seed);
    case Kind::gaussian_blur: return gaussian_blur(image, spec.param);
    case Kind::rotate:
        if (spec.param == 90) return rotate90(image);
        if (spec.param == 180) return rotate180(image);
        return rotate45(image);
    case Kind::scale: {
        const double f = spec.param > 0 ? 1.5 : 0.5;
        const auto w = static_cast<std::size_t>(std::lround(static_cast<double>(image.width()) * f));
        const auto h = static_cast<std::size_t>(std::lround(static_cast<double>(image.height()) * f));
        return resize_bilinear(image, w, h);
    }
    case Kind::jpeg: return jpeg_roundtrip(image, spec.param);
    }
    throw UsageError("unknown attack");
}

double psnr(const RgbImage& a, const RgbImage& b)
{
    if (a.width() != b.width() || a.height() != b.height()) throw DimensionError("PSNR of differently sized images");
    double sse = 0.0;
    std::size_t n = 0;
    for (std::size_t c = 0; c < 3; ++c) {
        const auto pa = a.channel(c).data();
        const auto pb = b.channel(c).data();
        for (std::size_t i = 0; i < pa.size(); ++i) {
            const double d = pa[i] - pb[i];
            sse += d * d;
        }
        n += pa.size();
    }
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(static_cast<double>(n) / sse);
}

}  // namespace convtrace::attacks
