#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace convtrace {

/// Single channel of normalized intensities, row-major, values in [0,1].
class Plane {
public:
    Plane() = default;
    Plane(std::size_t width, std::size_t height, double fill = 0.0);
    /// Takes ownership of `data`; throws ValidationError on size mismatch or
    /// values outside [0,1].
    Plane(std::size_t width, std::size_t height, std::vector<double> data);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double operator()(std::size_t x, std::size_t y) const noexcept { return data_[y * width_ + x]; }
    double& operator()(std::size_t x, std::size_t y) noexcept { return data_[y * width_ + x]; }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    /// Clamps every sample into [0,1].
    void clamp();

    bool operator==(const Plane&) const = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<double> data_;
};

struct RgbImage {
    Plane r, g, b;

    RgbImage() = default;
    RgbImage(std::size_t width, std::size_t height, double fill = 0.0);
    /// Throws ValidationError when the planes disagree on size.
    RgbImage(Plane red, Plane green, Plane blue);

    std::size_t width() const noexcept { return r.width(); }
    std::size_t height() const noexcept { return r.height(); }
    bool empty() const noexcept { return r.empty(); }

    Plane& channel(std::size_t c) noexcept { return c == 0 ? r : (c == 1 ? g : b); }
    const Plane& channel(std::size_t c) const noexcept { return c == 0 ? r : (c == 1 ? g : b); }

    bool operator==(const RgbImage&) const = default;
};

/// Rounds to the nearest 8-bit level, i.e. what a PNG round trip stores.
std::uint8_t to_byte(double v) noexcept;
RgbImage quantize_8bit(const RgbImage& image);

/// Center crop to width x height; DimensionError if larger than the image.
RgbImage center_crop(const RgbImage& image, std::size_t width, std::size_t height);

}  // namespace convtrace
