#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace convtrace {

/// SplitMix64 step; used to expand a 64-bit seed into generator state and to
/// derive independent child seeds.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Child seed for stream `index` of `seed` (trees, folds, images).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept
{
    std::uint64_t s = seed ^ (0xD1B54A32D192ED03ull * (index + 1));
    return splitmix64(s);
}

/// xoshiro256** 1.0 (Blackman & Vigna), state filled by four SplitMix64
/// outputs of the seed. Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit constexpr Xoshiro256(std::uint64_t seed) noexcept
    {
        std::uint64_t sm = seed;
        for (auto& s : state_) s = splitmix64(sm);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0,1) from the top 53 bits.
    constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n) by Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n) noexcept
    {
        if (n <= 1) return 0;
        const std::uint64_t threshold = (0 - n) % n;
        while (true) {
            const u128 product = static_cast<u128>((*this)()) * n;
            if (static_cast<std::uint64_t>(product) >= threshold) {
                return static_cast<std::uint64_t>(product >> 64);
            }
        }
    }

private:
    __extension__ using u128 = unsigned __int128;

    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
};

/// Fisher-Yates shuffle driven by Xoshiro256::below. Unlike std::shuffle the
/// permutation does not depend on the standard library.
template <typename RandomIt>
void shuffle(RandomIt first, RandomIt last, Xoshiro256& rng)
{
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
        const std::uint64_t j = rng.below(i);
        std::swap(first[static_cast<std::ptrdiff_t>(i - 1)], first[static_cast<std::ptrdiff_t>(j)]);
    }
}

}  // namespace convtrace
