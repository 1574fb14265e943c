#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "convtrace/image.hpp"
#include "convtrace/manifest.hpp"

namespace convtrace::synth {

enum class Kind { noise, smoothed_noise, linear_upsample, transpose_conv };

std::string to_string(Kind kind);
/// Accepts the names produced by to_string; ParseError otherwise.
Kind parse_kind(const std::string& name);
/// 0 (real) for noise kinds, 1 (fake) for upsampled kinds.
int label_for(Kind kind) noexcept;

using Kernel4 = std::array<double, 16>;  // row-major, [v][u]

/// Outer product of {0.25, 0.75, 0.75, 0.25} with itself: bilinear 2x
/// upsampling expressed as a 4x4, stride-2 transpose convolution.
Kernel4 default_transpose_kernel() noexcept;

struct SynthSpec {
    std::uint64_t seed = 0;
    std::size_t width = 128;
    std::size_t height = 128;
    Kind kind = Kind::noise;
    std::size_t count = 1;
    Kernel4 kernel = default_transpose_kernel();
    /// Manifest source tag; defaults to the kind name.
    std::string source;

    /// width, height >= 16 and count >= 1; upsampled kinds need even sizes.
    void validate() const;
};

/// i.i.d. uniform [0,1) samples from Xoshiro256(seed), filled plane by plane
/// (R, G, B), each in row-major order.
RgbImage gen_noise_image(std::uint64_t seed, std::size_t width, std::size_t height);

/// Noise filtered by a 3x3 box (edge-replicated borders), then perturbed by
/// uniform noise in [-0.05, 0.05] and clipped to [0,1].
RgbImage gen_smoothed_noise_image(std::uint64_t seed, std::size_t width, std::size_t height);

/// Separable 2x linear interpolation: out(2x,2y) = in(x,y), odd samples are
/// the mean of their two flanking even samples. The last odd column/row has
/// one flank and copies it.
RgbImage upsample_linear(const RgbImage& image);

/// Transpose convolution with a 4x4 kernel, stride 2 and padding 1, so the
/// output is exactly 2W x 2H; results clipped to [0,1].
RgbImage transpose_conv_upsample(const RgbImage& image, const Kernel4& kernel = default_transpose_kernel());

/// Image `index` of the stream described by `spec` (seed ^ index).
RgbImage generate(const SynthSpec& spec, std::size_t index);

/// Writes PNGs named <source>_<seed>_<index>.png into out_dir and returns
/// their manifest (paths relative to out_dir).
DatasetManifest gen_dataset(const std::vector<SynthSpec>& specs, const std::filesystem::path& out_dir);
DatasetManifest gen_dataset(const SynthSpec& spec, const std::filesystem::path& out_dir);

/// Parses a JSON spec document: one object or an array of objects with keys
/// seed, width, height, kind, count and optionally kernel (16 numbers) and
/// source.
std::vector<SynthSpec> parse_spec_json(const std::string& text);

}  // namespace convtrace::synth
