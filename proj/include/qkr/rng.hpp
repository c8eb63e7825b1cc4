#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qkr/config.hpp"

namespace qkr {

/// Seeded generator used everywhere randomness enters an experiment.
///
/// Engine is std::mt19937_64; uniform reals and bounded integers are built
/// directly from its raw output, not from <random> distributions.
class SeededRng {
public:
    static constexpr const char* generator_name = "mt19937_64";

    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n) by rejection, free of modulo bias.
    std::uint64_t below(std::uint64_t n)
    {
        if (n == 0)
            throw Error("SeededRng::below: empty range");
        const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// `count` distinct integers from [0, n), in the order they were drawn.
    std::vector<long> distinct(long count, long n)
    {
        if (count < 0 || count > n)
            throw Error("SeededRng::distinct: cannot draw " + std::to_string(count) +
                        " distinct values from " + std::to_string(n));
        // Partial Fisher-Yates over an index table.
        std::vector<long> pool(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i)
            pool[static_cast<std::size_t>(i)] = i;
        std::vector<long> out;
        out.reserve(static_cast<std::size_t>(count));
        for (long i = 0; i < count; ++i) {
            const auto j = static_cast<long>(below(static_cast<std::uint64_t>(n - i))) + i;
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
            out.push_back(pool[static_cast<std::size_t>(i)]);
        }
        return out;
    }

    /// Derive an independent child seed (SplitMix64 finalizer over a stream tag).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream)
    {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace qkr
