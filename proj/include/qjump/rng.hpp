#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qjump {

// Reproducible random streams.
//
// Generator identity (stable across releases, part of the file-format
// contract): each stream is a std::mt19937_64 seeded with a splitmix64
// hash of (base_seed, stream_index); uniforms are 53-bit mantissa draws;
// normals come from the Box-Muller transform with pair caching. Outputs
// therefore depend only on (base_seed, stream_index, draw count).

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// 64-bit child seed for stream `stream_index` of a run seeded by `base_seed`.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream_index) {
    return splitmix64(splitmix64(base_seed) ^ splitmix64(stream_index + 0x632be59bd9b4e019ULL));
}

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    RngStream(std::uint64_t base_seed, std::uint64_t stream_index)
        : gen_(derive_seed(base_seed, stream_index)) {}

    std::uint64_t raw() { return gen_(); }

    // Uniform on [0,1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the sine partner is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1] so the log is finite.
        double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
        double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace qjump
