#pragma once

#include <array>
#include <string>
#include <vector>

#include "convtrace/em.hpp"
#include "convtrace/image.hpp"

namespace convtrace {

/// Per-image fingerprint: the R, G and B kernels concatenated, each of
/// length (2*alpha+1)^2 - 1.
struct ConvolutionalTrace {
    int alpha = 1;
    std::vector<double> features;
    /// Channels (R, G, B) whose plane was flat; their slice is all zeros.
    std::array<bool, 3> degenerate{false, false, false};

    bool any_degenerate() const noexcept { return degenerate[0] || degenerate[1] || degenerate[2]; }
    /// "none" or the letters of the flagged channels, e.g. "G" or "RB".
    std::string degenerate_label() const;

    bool operator==(const ConvolutionalTrace&) const = default;
};

constexpr std::size_t trace_length(int alpha) noexcept { return 3 * em::kernel_length(alpha); }

/// Runs EM independently on each channel. A channel that raises
/// DegenerateInputError contributes zeros and is flagged; if all three do,
/// ExtractionError is thrown.
ConvolutionalTrace extract_ct(const RgbImage& image, const em::EmConfig& config);

}  // namespace convtrace
