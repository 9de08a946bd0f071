#pragma once

#include <cstdint>
#include <random>

namespace evoctrl {

// (master_seed, stream_id) fully determines a random stream. Independent
// episodes get stream_id = episode_index so that runs are reproducible and
// common-random-number comparisons are possible.
struct RngSeed {
    std::uint64_t master_seed = 42;
    std::uint64_t stream_id = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

class RngStream {
public:
    explicit RngStream(RngSeed seed) {
        std::uint64_t x = seed.master_seed;
        const std::uint64_t a = detail::splitmix64(x);
        x ^= 0xbf58476d1ce4e5b9ULL * (seed.stream_id + 1);
        const std::uint64_t b = detail::splitmix64(x);
        std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53 random bits. Avoids std::uniform_real_distribution
    // so streams are identical across standard library implementations.
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in {0, ..., bound-1}, unbiased.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % bound;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace evoctrl
