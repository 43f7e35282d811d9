#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace tdrc {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives an independent stream key from a seed and up to two labels.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(mix64(seed + kGolden) ^ (a * kGolden + 1)) ^ (b * 0xD1B54A32D192ED03ULL + 7));
}

// Counter-based generator: draw i of a stream is mix64(key + (i+1)*golden),
// i.e. the splitmix64 sequence seeded with `key`. Any draw can be recomputed
// from (key, i) alone, so results do not depend on scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t key, std::uint64_t counter = 0) : key_(key), counter_(counter) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    int uniform_int(int n) {
        auto prod = static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned>(n);
        return static_cast<int>(prod >> 64);
    }

    double normal() {
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Samples an index from probabilities p[0..n); falls back to the last
    // index with positive mass when rounding leaves u above the total.
    template <class Probs>
    int categorical(const Probs& p, int n) {
        double u = uniform();
        double acc = 0.0;
        int last = -1;
        for (int i = 0; i < n; ++i) {
            if (p[i] <= 0.0) continue;
            acc += p[i];
            last = i;
            if (u < acc) return i;
        }
        return last < 0 ? 0 : last;
    }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace tdrc
