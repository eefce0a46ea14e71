#pragma once

#include <cmath>
#include <cstdint>

namespace momq::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer. All randomness in the project goes through this
// mixer so that streams are a pure function of (seed, counter).
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

// Derives an independent stream seed from (base, stream, index).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index) {
    return mix64(mix64(base + kGolden * stream) + kGolden * index);
}

// Counter-based generator: output i is mix64(key + i * kGolden). The state
// is just the counter, so identical seeds replay identical streams.
class Counter {
  public:
    explicit Counter(std::uint64_t seed) : key_(mix64(seed + kGolden)) {}

    std::uint64_t next_u64() { return mix64(key_ + kGolden * ++counter_); }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1], safe for log()
    double next_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Box-Muller; the spare value is cached.
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u = next_open();
        const double v = next_double();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * v;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace momq::rng
