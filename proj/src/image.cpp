#include "convtrace/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "convtrace/error.hpp"

namespace convtrace {

Plane::Plane(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), data_(width * height, std::clamp(fill, 0.0, 1.0))
{
}

Plane::Plane(std::size_t width, std::size_t height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data))
{
    if (data_.size() != width_ * height_) {
        throw ValidationError("plane data length " + std::to_string(data_.size()) +
                              " does not match " + std::to_string(width_) + "x" +
                              std::to_string(height_));
    }
    for (double v : data_) {
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("plane value outside [0,1]");
    }
}

void Plane::clamp()
{
    for (double& v : data_) v = std::clamp(v, 0.0, 1.0);
}

RgbImage::RgbImage(std::size_t width, std::size_t height, double fill)
    : r(width, height, fill), g(width, height, fill), b(width, height, fill)
{
}

RgbImage::RgbImage(Plane red, Plane green, Plane blue)
    : r(std::move(red)), g(std::move(green)), b(std::move(blue))
{
    if (r.width() != g.width() || r.width() != b.width() || r.height() != g.height() ||
        r.height() != b.height()) {
        throw ValidationError("RGB planes differ in size");
    }
}

std::uint8_t to_byte(double v) noexcept
{
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

RgbImage quantize_8bit(const RgbImage& image)
{
    RgbImage out = image;
    for (std::size_t c = 0; c < 3; ++c) {
        for (double& v : out.channel(c).data()) v = to_byte(v) / 255.0;
    }
    return out;
}

RgbImage center_crop(const RgbImage& image, std::size_t width, std::size_t height)
{
    if (width > image.width() || height > image.height() || width == 0 || height == 0) {
        throw DimensionError("crop " + std::to_string(width) + "x" + std::to_string(height) +
                             " does not fit " + std::to_string(image.width()) + "x" +
                             std::to_string(image.height()));
    }
    const std::size_t x0 = (image.width() - width) / 2;
    const std::size_t y0 = (image.height() - height) / 2;
    RgbImage out(width, height);
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t y = 0; y < height; ++y) {
            for (std::size_t x = 0; x < width; ++x) {
                out.channel(c)(x, y) = image.channel(c)(x0 + x, y0 + y);
            }
        }
    }
    return out;
}

}  // namespace convtrace
