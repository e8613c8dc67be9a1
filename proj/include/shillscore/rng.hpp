#pragma once

#include <cstdint>
#include <random>

namespace shillscore {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Seed for substream k of a root seed. Substreams are independent for
// simulation purposes, so a stream keyed by auction index never shifts when
// auctions are added or removed elsewhere in the run.
inline std::uint64_t derive_stream_seed(std::uint64_t root, std::uint64_t k) {
    return splitmix64(root ^ splitmix64(k + 1));
}

// mt19937_64 with hand-rolled draws. The engine's output sequence is fixed
// by the standard, and avoiding std distributions keeps generated bytes
// identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Inclusive on both ends. Modulo bias is negligible at simulation scales.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi <= lo) return lo;
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    double uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform_real() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace shillscore
