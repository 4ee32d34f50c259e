#ifndef QCSM_RNG_H
#define QCSM_RNG_H

#include <cmath>
#include <cstdint>

namespace qcsm {

// Counter-based pseudo-random bits: every value is a pure function of
// (key, counter), so parallel workers can draw from disjoint streams
// without shared state and results are identical across platforms.
// The mixer is the splitmix64 finalizer applied to the combined words.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
    return mix64(a ^ (mix64(b) + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)));
}

// Stateless draw keyed by up to four stream coordinates.
inline uint64_t counter_bits(uint64_t seed, uint64_t s1, uint64_t s2 = 0, uint64_t s3 = 0) {
    uint64_t h = mix64(seed);
    h = hash_combine(h, s1);
    h = hash_combine(h, s2);
    h = hash_combine(h, s3);
    return h;
}

// Uniform double in [0,1) from 53 mantissa bits.
inline double bits_to_unit(uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double counter_unit(uint64_t seed, uint64_t s1, uint64_t s2 = 0, uint64_t s3 = 0) {
    return bits_to_unit(counter_bits(seed, s1, s2, s3));
}

// Small sequential generator (xoshiro256**) for Markov chains. Seeded from
// the counter scheme so chain streams are reproducible and independent.
class Rng {
   public:
    explicit Rng(uint64_t seed, uint64_t stream = 0) {
        for (int i = 0; i < 4; i++) {
            s_[i] = counter_bits(seed, stream, 0x5eedull, static_cast<uint64_t>(i));
        }
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
            s_[0] = 1;
        }
    }

    uint64_t next_bits() {
        uint64_t result = rotl(s_[1] * 5, 7) * 9;
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1).
    double unit() {
        return bits_to_unit(next_bits());
    }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) {
        // 64-bit multiply-shift; bias is negligible for the n used here.
        return static_cast<uint64_t>((static_cast<unsigned __int128>(next_bits()) * n) >> 64);
    }

    // Standard normal via Box-Muller (fixed algorithm, platform independent).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = unit(), u2 = unit();
        while (u1 <= 0) {
            u1 = unit();
        }
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    void save_state(uint64_t out[4]) const {
        for (int i = 0; i < 4; i++) out[i] = s_[i];
    }
    void load_state(const uint64_t in[4]) {
        for (int i = 0; i < 4; i++) s_[i] = in[i];
        have_spare_ = false;
    }

   private:
    static uint64_t rotl(uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0;
};

}  // namespace qcsm

#endif
