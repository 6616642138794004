#pragma once

#include <cstdint>
#include <vector>

namespace netact {

/// Deterministic 64-bit generator (xorshift-multiply mixer driven by a
/// Weyl sequence, i.e. splitmix64). The standard <random> distributions are
/// implementation-defined, so every draw used anywhere in the pipeline goes
/// through this class to keep outputs byte-identical across platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound). Rejection sampling, unbiased.
    uint64_t next_below(uint64_t bound) {
        if (bound <= 1) return 0;
        uint64_t threshold = (0ULL - bound) % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform integer in [lo, hi] inclusive.
    int64_t next_int(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo + 1)));
    }

    /// Uniform double in [0, 1) with 53 bits of randomness.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool next_bernoulli(double p) { return next_double() < p; }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Derive an independent stream, e.g. one per tree or per worker.
    Rng fork(uint64_t stream_id) {
        Rng child(state_ ^ (0x5851f42d4c957f2dULL * (stream_id + 1)));
        child.next_u64();
        return child;
    }

private:
    uint64_t state_;
};

}  // namespace netact
