#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace drrl {

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// 64-bit FNV-1a hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/**
 * Seeded random stream with platform-independent sampling.
 *
 * The standard distributions are implementation-defined, so every draw here
 * is computed directly from the raw mt19937_64 output. Two streams built from
 * the same (seed, name) produce identical sequences on every platform.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(mix64(seed)) {}
    Rng(std::uint64_t master_seed, std::string_view stream_name)
        : engine_(mix64(master_seed ^ mix64(fnv1a64(stream_name)))) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), unbiased (rejection sampling).
    std::uint64_t uniform_int(std::uint64_t n);

    /// Standard exponential variate.
    double exponential();

    /// Bernoulli(p).
    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform point on the probability simplex of dimension n (Dirichlet(1,...,1)).
    std::vector<double> simplex(std::size_t n);

    /// Index drawn from an unnormalized discrete distribution.
    std::size_t categorical(const std::vector<double>& weights);

    /// Child stream; the parent advances by one draw.
    Rng split() { return Rng(engine_()); }

private:
    std::mt19937_64 engine_;
};

} // namespace drrl
