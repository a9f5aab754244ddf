#pragma once

#include <cmath>
#include <cstdint>

namespace gravitree {

// Counter-based random stream: value k of stream s under seed q is a pure
// function hash(q, s, k), so independent streams can be drawn concurrently
// and reproduce bit-identically for a given seed.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    // uniform in [0, 1)
    double uniform() { return to_unit(next()); }

    // uniform in (0, 1], safe for log()
    double uniform_pos() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t next() { return mix(seed_, stream_, counter_++); }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
        // splitmix64 finalizer over a seed/stream/counter combination
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z += counter * 0x9e3779b97f4a7c15ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        z *= 0xd6e8feb86659fd93ULL;
        z ^= z >> 32;
        return z;
    }

private:
    static double to_unit(std::uint64_t v) {
        return static_cast<double>(v >> 11) * 0x1.0p-53;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace gravitree
