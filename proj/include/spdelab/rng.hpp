#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace spdelab {

// Counter-based stream generator. Each draw is a strong 64-bit mix of
// (key, counter), so the stream is fully determined by (seed, stream_id):
// paths seeded as (base_seed, path_index) are reproducible and independent
// of evaluation order.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix64(mix64(seed ^ 0x8BADF00DDEADBEEFULL) ^
                     (0x9E3779B97F4A7C15ULL * (stream + 0x632BE59BD9B4E019ULL)))) {}

    std::uint64_t next_u64() { return mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

    // Uniform on (0, 1] with 53-bit resolution (never 0, safe under log).
    double next_uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the second deviate of each pair is
    // cached so draws come in a fixed, schedule-independent order.
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace spdelab
