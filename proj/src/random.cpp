#include "renn/random.hpp"

#include <cmath>
#include <numbers>

namespace renn {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
    // Three rounds of mixing keep adjacent (stream, counter) keys decorrelated.
    std::uint64_t h = splitmix64(seed_);
    h = splitmix64(h ^ stream_);
    return splitmix64(h ^ counter);
}

double CounterRng::uniform(std::uint64_t counter) const {
    // 53 random mantissa bits, offset by half an ulp to exclude 0 and 1.
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t index) const {
    const double u1 = uniform(2 * index);
    const double u2 = uniform(2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void shuffle_indices(std::vector<std::size_t>& items, const CounterRng& rng, std::uint64_t first_counter) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::uint64_t r = rng.bits(first_counter + (items.size() - i));
        // Modulo bias is below 2^-40 for any realistic dataset size.
        const std::size_t j = static_cast<std::size_t>(r % i);
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace renn
