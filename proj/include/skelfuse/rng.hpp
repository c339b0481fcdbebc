#pragma once

/// \file rng.hpp
/// \brief Portable seeded random numbers.
///
/// Raw bits come from std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Reals are derived here rather than through <random> distributions, whose
/// algorithms differ between standard libraries:
///   uniform()   = (next() >> 11) * 2^-53, in [0, 1)
///   normal()    = Box-Muller on two uniforms u1, u2 drawn in that order:
///                 sqrt(-2 ln(1 - u1)) * cos(2 pi u2)
///   poisson(l)  = Knuth's multiplication method on uniform()
/// Stream seeds are derived with the SplitMix64 finalizer.

#include <cstdint>
#include <random>

namespace skelfuse {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of an independent sub-stream, e.g. derive_seed(seed, kSkeletonStream, clip_index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    /// Integer in [lo, hi].
    std::int64_t range(std::int64_t lo, std::int64_t hi);
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }
    bool bernoulli(double p) { return uniform() < p; }
    std::uint32_t poisson(double lambda);

private:
    std::mt19937_64 engine_;
};

} // namespace skelfuse
