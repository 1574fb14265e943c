#include "convtrace/trace.hpp"

#include "convtrace/error.hpp"

namespace convtrace {

std::string ConvolutionalTrace::degenerate_label() const
{
    static constexpr char kNames[3] = {'R', 'G', 'B'};
    std::string out;
    for (std::size_t c = 0; c < 3; ++c) {
        if (degenerate[c]) out += kNames[c];
    }
    return out.empty() ? "none" : out;
}

ConvolutionalTrace extract_ct(const RgbImage& image, const em::EmConfig& config)
{
    config.validate();
    const std::size_t m = em::kernel_length(config.alpha);
    ConvolutionalTrace ct;
    ct.alpha = config.alpha;
    ct.features.assign(3 * m, 0.0);
    for (std::size_t c = 0; c < 3; ++c) {
        try {
            const em::EmResult res = em::run_em(image.channel(c), config);
            std::copy(res.kernel.coeffs.begin(), res.kernel.coeffs.end(),
                      ct.features.begin() + static_cast<std::ptrdiff_t>(c * m));
        } catch (const DegenerateInputError&) {
            ct.degenerate[c] = true;
        }
    }
    if (ct.degenerate[0] && ct.degenerate[1] && ct.degenerate[2]) {
        throw ExtractionError("all three channels are degenerate");
    }
    return ct;
}

}  // namespace convtrace
