// Seeded, splittable random numbers. Every public sampling entry point takes an
// explicit 64-bit seed; worker streams are derived with split(), never shared.
#pragma once

#include <cmath>
#include <cstdint>

namespace emq {

// splitmix64, used both as a stream-derivation hash and to seed streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// derived sub-stream seed; order independent
inline std::uint64_t splitmix_key(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull * (index + 1));
    return splitmix64(s);
}

// xoshiro256** with fully specified output; portable and fast.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
        have_gauss_ = false;
    }

    // derived stream for worker `index`; independent of call order
    static Rng split(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t sm = seed ^ (0xa0761d6478bd642full * (index + 1));
        return Rng(splitmix64(sm));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo,hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal, Box-Muller (kept explicit so streams are bit-reproducible)
    double gaussian() {
        if (have_gauss_) {
            have_gauss_ = false;
            return cached_gauss_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_gauss_ = r * std::sin(a);
        have_gauss_ = true;
        return r * std::cos(a);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
    double cached_gauss_ = 0.0;
    bool have_gauss_;
};

}  // namespace emq
