#pragma once

#include <cstdint>

namespace cwsk {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// SplitMix64 stream: the state advances by the golden gamma per output.
class SplitMix64 {
  public:
    constexpr explicit SplitMix64(std::uint64_t state) : state_(state) {}

    constexpr std::uint64_t operator()() { return mix64(state_ += kGoldenGamma); }

    // Top 53 bits mapped to (0, 1]; never zero, so safe under log.
    double open_unit() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }
    // Top 53 bits mapped to [0, 1).
    double unit() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    // Uniform integer in [0, n) by 128-bit multiply-shift.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
    }

  private:
    std::uint64_t state_;
};

// Derives an independent seed for a numbered sub-experiment.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index + 1) ^ 0xD1B54A32D192ED03ull);
}

}  // namespace cwsk
