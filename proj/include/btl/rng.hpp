#pragma once

#include <cstdint>

// Counter-based pseudo-random streams built on the SplitMix64 mixer.
// Substreams are derived by hashing (seed, tag, indices), so any
// (iteration, pair) combination reads from its own stream and results do
// not depend on evaluation order or thread count.

namespace btl::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
inline std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t substream(std::uint64_t seed, std::uint64_t a) {
    return mix(seed + kGolden * (a + 1));
}

inline std::uint64_t substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return substream(substream(seed, a), b);
}

inline std::uint64_t substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                               std::uint64_t c) {
    return substream(substream(seed, a, b), c);
}

// Stream tags keep unrelated draw kinds on disjoint substreams.
enum Tag : std::uint64_t {
    kTagIteration = 1,
    kTagCell = 2,
    kTagPairOutcome = 3,
    kTagPairInclusion = 4,
    kTagInstance = 5,
};

class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix(state_);
    }

    // Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

}  // namespace btl::rng
