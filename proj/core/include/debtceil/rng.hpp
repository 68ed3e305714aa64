#pragma once

#include <array>
#include <cstdint>

#include "debtceil/math.hpp"

namespace debtceil {

// Philox4x32-10 counter-based generator. Output depends only on (key, counter),
// so draws indexed by (seed, path, step) are identical under any thread schedule.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kW0;
            key[1] += kW1;
        }
        return ctr;
    }
};

/// Two u64 words for (seed; stream, counter).
inline std::array<std::uint64_t, 2> philox_words(std::uint64_t seed, std::uint64_t stream,
                                                 std::uint64_t counter) {
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
        static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32)};
    const auto out = Philox4x32::block(ctr, key);
    return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
            (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

/// Uniform in (0,1) from a u64; never returns 0 or 1.
inline double u64_to_unit(std::uint64_t w) {
    return static_cast<double>(w >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

/// Two independent N(0,1) draws for (seed; stream, counter).
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t stream,
                                         std::uint64_t counter) {
    const auto w = philox_words(seed, stream, counter);
    return {inv_normal_cdf(u64_to_unit(w[0])), inv_normal_cdf(u64_to_unit(w[1]))};
}

inline std::array<double, 2> uniform_pair(std::uint64_t seed, std::uint64_t stream,
                                          std::uint64_t counter) {
    const auto w = philox_words(seed, stream, counter);
    return {u64_to_unit(w[0]), u64_to_unit(w[1])};
}

}  // namespace debtceil
