#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "rbmpb/vec.hpp"

namespace rbmpb {

// Counter-based Gaussian/uniform source. Draws are a pure function of
// (master_seed, stream_id, step, index), so trajectories do not depend on
// execution order or worker count.
struct RngSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    RngSpec with_stream(std::uint64_t s) const { return {master_seed, s}; }
};

namespace detail {

// Philox 4x32-10 block cipher (Salmon et al., counter-based RNG).
struct PhiloxBlock {
    std::array<std::uint32_t, 4> w;
};

inline PhiloxBlock philox4x32_10(std::uint64_t key, const std::array<std::uint32_t, 4>& counter) {
    constexpr std::uint32_t M0 = 0xD2511F53u;
    constexpr std::uint32_t M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u;
    constexpr std::uint32_t W1 = 0xBB67AE85u;

    std::uint32_t x0 = counter[0], x1 = counter[1], x2 = counter[2], x3 = counter[3];
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);

    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * x0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * x2;
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        x0 = hi1 ^ x1 ^ k0;
        x1 = lo1;
        x2 = hi0 ^ x3 ^ k1;
        x3 = lo0;
        k0 += W0;
        k1 += W1;
    }
    return {{x0, x1, x2, x3}};
}

inline std::uint64_t u64_from(std::uint32_t lo, std::uint32_t hi) {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

// [0, 1), 53-bit resolution
inline double to_unit(std::uint64_t u) {
    return static_cast<double>(u >> 11) * 0x1.0p-53;
}

// (0, 1]
inline double to_unit_open(std::uint64_t u) {
    return static_cast<double>((u >> 11) + 1) * 0x1.0p-53;
}

}  // namespace detail

// One block of randomness for a (stream, step, block_index) triple:
// two U(0,1) doubles or two N(0,1) doubles via Box-Muller.
struct RandomBlock {
    double a, b;
};

inline RandomBlock uniform_block(const RngSpec& rng, std::uint64_t step, std::uint32_t block) {
    const auto out = detail::philox4x32_10(
        rng.master_seed,
        {static_cast<std::uint32_t>(rng.stream_id),
         static_cast<std::uint32_t>(rng.stream_id >> 32),
         static_cast<std::uint32_t>(step),
         static_cast<std::uint32_t>(step >> 32) ^ block});
    return {detail::to_unit(detail::u64_from(out.w[0], out.w[1])),
            detail::to_unit(detail::u64_from(out.w[2], out.w[3]))};
}

inline RandomBlock gaussian_block(const RngSpec& rng, std::uint64_t step, std::uint32_t block) {
    const auto out = detail::philox4x32_10(
        rng.master_seed,
        {static_cast<std::uint32_t>(rng.stream_id),
         static_cast<std::uint32_t>(rng.stream_id >> 32),
         static_cast<std::uint32_t>(step),
         static_cast<std::uint32_t>(step >> 32) ^ block});
    const double u1 = detail::to_unit_open(detail::u64_from(out.w[0], out.w[1]));
    const double u2 = detail::to_unit(detail::u64_from(out.w[2], out.w[3]));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

inline double gaussian(const RngSpec& rng, std::uint64_t step, std::uint32_t index) {
    const auto blk = gaussian_block(rng, step, index / 2);
    return (index % 2 == 0) ? blk.a : blk.b;
}

inline double uniform(const RngSpec& rng, std::uint64_t step, std::uint32_t index) {
    const auto blk = uniform_block(rng, step, index / 2);
    return (index % 2 == 0) ? blk.a : blk.b;
}

inline std::uint64_t uniform_u64(const RngSpec& rng, std::uint64_t step, std::uint32_t index) {
    const auto out = detail::philox4x32_10(
        rng.master_seed,
        {static_cast<std::uint32_t>(rng.stream_id),
         static_cast<std::uint32_t>(rng.stream_id >> 32),
         static_cast<std::uint32_t>(step),
         static_cast<std::uint32_t>(step >> 32) ^ (0x80000000u | index)});
    return detail::u64_from(out.w[0], out.w[1]);
}

// Unbiased-in-practice bounded draw (Lemire reduction; bias < 2^-64).
inline std::uint64_t uniform_below(const RngSpec& rng, std::uint64_t step, std::uint32_t index,
                                   std::uint64_t bound) {
    const unsigned __int128 m =
        static_cast<unsigned __int128>(uniform_u64(rng, step, index)) * bound;
    return static_cast<std::uint64_t>(m >> 64);
}

template <int D>
inline Vec<D> gaussian_vec(const RngSpec& rng, std::uint64_t step) {
    Vec<D> g;
    const auto b0 = gaussian_block(rng, step, 0);
    g[0] = b0.a;
    if constexpr (D >= 2) g[1] = b0.b;
    if constexpr (D == 3) g[2] = gaussian_block(rng, step, 1).a;
    return g;
}

// Reserved stream ids. Particle streams are allocated from 0 upward;
// ensemble-level draws (batch shuffles, particle removal) live in the
// top half of the id space so they can never collide.
inline constexpr std::uint64_t kShuffleStream = 0x8000000000000000ull;
inline constexpr std::uint64_t kRemovalStream = 0x8000000000000001ull;

// Step index reserved for draws made before the simulation starts
// (initial positions).
inline constexpr std::uint64_t kInitStep = 0xFFFFFFFFFFFFFFFFull;

}
