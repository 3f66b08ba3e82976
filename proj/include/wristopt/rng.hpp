#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace wristopt {

// mt19937_64 with hand-rolled uniform helpers. std::*_distribution output is
// implementation-specified and some carry hidden state, which would break
// checkpoint-exact resume; these helpers are bit-portable and stateless.
class Rng {
public:
    Rng() : engine_(0x9e3779b97f4a7c15ULL) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1): 53 mantissa bits
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1): never exactly 0, for logs and SBX spreads
    double uniform01_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::size_t uniform_index(std::size_t n) {
        // n is tiny here (population sizes); modulo bias is irrelevant but
        // rejection keeps the stream exactly uniform anyway
        const std::uint64_t limit = ~0ULL - ~0ULL % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return static_cast<std::size_t>(v % n);
    }

    // Stable per-task stream derivation (splitmix64 over the mixed words),
    // independent of draw order on the parent stream.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                std::uint64_t c = 0) {
        auto mix = [](std::uint64_t x) {
            x += 0x9e3779b97f4a7c15ULL;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            return x ^ (x >> 31);
        };
        return mix(mix(mix(seed) ^ a) ^ mix(b + 0x517cc1b727220a95ULL)) ^ mix(c);
    }

    std::string serialize() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }

    void deserialize(const std::string& state) {
        std::istringstream is(state);
        is >> engine_;
        if (!is) throw std::runtime_error("Rng: bad serialized state");
    }

private:
    std::mt19937_64 engine_;
};

} // namespace wristopt
