#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace crowdbandit {

// splitmix64 finalizer, used to derive independent sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D649BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return splitmix64(mix_seed(a, b) ^ splitmix64(c));
}

// Stream tags for deriving the per-run sub-streams from one run seed.
inline constexpr std::uint64_t kInstanceStream = 0x494E5354ull; // worker models + labels
inline constexpr std::uint64_t kPolicyStream = 0x504F4C59ull;   // engine decisions
inline constexpr std::uint64_t kEvalStream = 0x4556414Cull;     // checkpoint tie-breaks

// Seeded random source. All draws are built directly on the mt19937_64
// output sequence (which the standard pins down bit-for-bit), so logs and
// output files replay identically across standard-library versions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform in {0, ..., n-1}, unbiased via rejection.
    int uniform_index(int n) {
        if (n <= 0) throw std::invalid_argument("uniform_index: n must be positive");
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
        for (;;) {
            const std::uint64_t v = engine_();
            if (v <= limit) return static_cast<int>(v % bound);
        }
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Fair coin over {-1, +1}.
    int coin_label() { return (engine_() & 1u) ? +1 : -1; }

  private:
    std::mt19937_64 engine_;
};

} // namespace crowdbandit
