#ifndef HETBENCH_RNG_HPP
#define HETBENCH_RNG_HPP

#include <cstdint>

namespace hetbench {

// Stateless counter-based generator. Every draw is a pure function of
// (key, counter), so streams can be split across workers without any
// shared state and a variant's numbers never depend on batch layout.
namespace rng {

constexpr std::uint64_t kStreamIncrement = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

// Combines a key and a counter into one 64-bit draw.
constexpr std::uint64_t at(std::uint64_t key, std::uint64_t counter) {
    return mix64(mix64(key + kStreamIncrement) ^ (counter * 0xD1B54A32D192ED03ull + 1));
}

// Uniform in [0, 1).
constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace rng

// Convenience stream over rng::at with an advancing counter.
class RngStream {
public:
    explicit RngStream(std::uint64_t key, std::uint64_t counter = 0)
        : key_(key), counter_(counter) {}

    std::uint64_t next_u64() { return rng::at(key_, counter_++); }
    double next_unit() { return rng::to_unit(next_u64()); }
    double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace hetbench

#endif
