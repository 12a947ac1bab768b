#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace mutabench {

// Platform-stable random source. std::mt19937_64's output sequence is fixed
// by the standard; the distributions below are hand-rolled because the
// standard library ones are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    // Uniform in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return unit() < p; }

    // Index drawn proportionally to non-negative weights; returns weights.size()
    // when every weight is zero.
    std::size_t weighted(std::span<const double> weights) {
        double total = 0;
        for (double w : weights) total += w;
        if (total <= 0) return weights.size();
        double r = unit() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0) continue;
            if (r < weights[i]) return i;
            r -= weights[i];
        }
        for (std::size_t i = weights.size(); i-- > 0;) {
            if (weights[i] > 0) return i;
        }
        return weights.size();
    }

private:
    std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Independent stream for (seed, label, index), e.g. one per task sample.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index) {
    return splitmix64(splitmix64(seed ^ fnv1a64(label)) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace mutabench
