#pragma once

#include <cstdint>

namespace pandora {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based draw for (seed, trial, box): a uniform 53-bit integer.
/// Every box of every trial has its own stream, so results do not depend on
/// the order boxes are opened or on how trials are scheduled.
constexpr std::uint64_t box_draw(std::uint64_t seed, std::uint64_t trial, std::uint64_t box) {
    std::uint64_t x = mix64(seed + kGolden * (trial + 1));
    x = mix64(x + kGolden * (box + 1));
    return x >> 11;
}

/// Sequential SplitMix64 stream.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

    /// Uniform integer in [0, bound), bound > 0, by rejection.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        for (;;) {
            std::uint64_t x = next();
            if (x < limit) return x % bound;
        }
    }

    /// Uniform integer in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

private:
    std::uint64_t state_;
};

}  // namespace pandora
