#pragma once

#include "ucr/types.hpp"

#include <cstdint>

namespace ucr {

// Counter-based generator: every output is a pure function of
// (seed, stream, counter), so trial-level parallelism stays deterministic
// regardless of scheduling. The mixer is the SplitMix64 finalizer applied
// twice with decorrelated keys.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ull))) {}

    std::uint64_t next_u64() {
        return mix(key_ + 0x9e3779b97f4a7c15ull * ++ctr_);
    }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound), rejection sampled.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    /// Inverse-CDF draw from a pmf over {0, ..., len-1}.
    int next_categorical(const Vec& pmf) {
        double u = next_double();
        double acc = 0.0;
        for (Eigen::Index i = 0; i < pmf.size(); ++i) {
            acc += pmf(i);
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(pmf.size()) - 1;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
        z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
        return z ^ (z >> 33);
    }

    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

}  // namespace ucr
