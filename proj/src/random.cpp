#include "orbitplan/random.hpp"

#include <stdexcept>
#include <vector>

namespace orbitplan {

Rng Rng::for_stream(std::initializer_list<std::uint64_t> ids) {
    std::vector<std::uint32_t> words;
    words.reserve(ids.size() * 2);
    for (const std::uint64_t id : ids) {
        words.push_back(static_cast<std::uint32_t>(id & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(id >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return Rng((static_cast<std::uint64_t>(out[1]) << 32) | out[0]);
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below requires a positive bound");
    // Rejection keeps the draw unbiased: accept only below the largest
    // multiple of bound that fits in 64 bits.
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % bound + 1) % bound;
    std::uint64_t x = engine_();
    while (x > limit) x = engine_();
    return x % bound;
}

}  // namespace orbitplan
