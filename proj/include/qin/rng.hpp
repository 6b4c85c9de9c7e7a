#pragma once

#include <cstdint>

namespace qin {

// SplitMix64 stream. Cheap, stateless to fork: substream(master, t) derives
// an independent generator for trial t, so results do not depend on the
// execution schedule.
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [0, bound). Multiply-shift; bias is < bound / 2^64.
    uint64_t next_below(uint64_t bound) {
        return static_cast<uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    static SplitMix64 substream(uint64_t master, uint64_t index) {
        SplitMix64 mix(master ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
        return SplitMix64(mix.next());
    }

  private:
    uint64_t state_;
};

}  // namespace qin
