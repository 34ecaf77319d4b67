#ifndef POLYXTAL_RNG_HPP
#define POLYXTAL_RNG_HPP

#include <cstdint>
#include <numbers>

namespace polyxtal {

// Counter-based stream cut from splitmix64. Each (seed, sample, key) tuple
// yields an independent deterministic stream, so ensemble results do not
// depend on which thread draws which sample.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t sample, std::uint64_t key = 0) {
        state_ = mix(seed ^ 0x2545f4914f6cdd1dull);
        state_ = mix(state_ ^ (sample + 0x9e3779b97f4a7c15ull));
        state_ = mix(state_ ^ (key + 0xd6e8feb86659fd93ull));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform angle in [-pi, pi).
    double next_angle() { return -std::numbers::pi + 2.0 * std::numbers::pi * next_unit(); }

    /// Uniform integer in [0, n); n must be small (modulo bias is ~n/2^64).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Stable stream identifier for artifact metadata.
    static std::uint64_t stream_id(std::uint64_t seed, std::uint64_t sample) {
        return mix(mix(seed ^ 0x2545f4914f6cdd1dull) ^ (sample + 0x9e3779b97f4a7c15ull));
    }

private:
    std::uint64_t state_;
};

} // namespace polyxtal

#endif
