#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace orbitplan {

// Seedable random source with platform-stable draws.
//
// The standard distributions are implementation-defined, so bounded integers
// and unit doubles are derived directly from the mt19937_64 output, whose
// sequence is fixed by the standard. Results are reproducible across
// compilers and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Independent stream for a tuple of identifiers, e.g. (seed, island,
    // generation). Built on std::seed_seq, which is fully specified.
    static Rng for_stream(std::initializer_list<std::uint64_t> ids);

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, bound). bound must be positive.
    std::uint64_t uniform_below(std::uint64_t bound);

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace orbitplan
