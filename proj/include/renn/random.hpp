#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace renn {

/// Counter-based generator: every draw is a pure function of (seed, stream, counter),
/// so samples can be produced in any order and still come out identical.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    std::uint64_t bits(std::uint64_t counter) const;
    /// Uniform in the open interval (0, 1).
    double uniform(std::uint64_t counter) const;
    /// Standard normal via Box-Muller; consumes counters 2*index and 2*index+1.
    double normal(std::uint64_t index) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Fisher-Yates shuffle of `items` driven by `rng` counters starting at `first_counter`.
void shuffle_indices(std::vector<std::size_t>& items, const CounterRng& rng, std::uint64_t first_counter = 0);

}  // namespace renn
