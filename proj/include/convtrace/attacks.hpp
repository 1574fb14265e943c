#pragma once

#include <cstdint>
#include <string>

#include "convtrace/image.hpp"

namespace convtrace::attacks {

enum class Kind { random_square, gaussian_blur, rotate, scale, jpeg };

/// One perturbation with its single parameter:
///   gaussian_blur: kernel size 3, 9 or 15
///   rotate:        degrees 45, 90 or 180 (counter-clockwise)
///   scale:         percent +50 or -50
///   jpeg:          quality 50
struct AttackSpec {
    Kind kind = Kind::random_square;
    int param = 0;
    std::uint64_t seed = 0;  // random_square only

    /// CLI token: random-square, blur:3, rotate:90, scale:+50, jpeg:50.
    std::string token() const;
    /// UsageError on unknown names or parameter values outside the list.
    static AttackSpec parse(const std::string& token, std::uint64_t seed = 0);
    void validate() const;
};

RgbImage apply_attack(const RgbImage& image, const AttackSpec& spec);

// Individual transforms.
RgbImage random_square(const RgbImage& image, std::uint64_t seed);
/// Separable Gaussian, sigma = 0.3 * ((ksize - 1) / 2 - 1) + 0.8, borders
/// reflected without repeating the edge sample.
RgbImage gaussian_blur(const RgbImage& image, int ksize);
double blur_sigma(int ksize) noexcept;
/// Exact permutations. rotate90: W x H -> H x W, out(y, W-1-x) = in(x, y).
RgbImage rotate90(const RgbImage& image);
RgbImage rotate180(const RgbImage& image);
/// Bilinear rotation about the center, cropped to the largest axis-aligned
/// square inside the rotated frame. DimensionError below 8x8.
RgbImage rotate45(const RgbImage& image);
/// Bilinear resize (pixel-center aligned) to round(W*f) x round(H*f).
RgbImage resize_bilinear(const RgbImage& image, std::size_t width, std::size_t height);
RgbImage jpeg_roundtrip(const RgbImage& image, int quality);

double psnr(const RgbImage& a, const RgbImage& b);

}  // namespace convtrace::attacks
