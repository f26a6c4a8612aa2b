#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace lacnet {

// Deterministic per-concern random stream. Same (seed, stream id) yields the
// same draw sequence on every platform, so all distributions are hand-rolled
// on top of raw 64-bit output instead of using <random> distribution objects
// (whose sequences are implementation-defined).
//
// Generator: xoshiro256** seeded via splitmix64 of (seed ^ fnv1a(stream_id)).
class RngStream {
public:
    RngStream() : RngStream(0, "default") {}

    RngStream(uint64_t seed, std::string_view stream_id) {
        uint64_t h = 1469598103934665603ull; // FNV offset basis
        for (char c : stream_id) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        uint64_t sm = seed ^ h;
        for (auto& w : state_) w = splitmix64(sm);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // mean > 0; support is strictly positive
    double exponential(double mean) {
        double u;
        do { u = uniform(); } while (u == 0.0);
        return -mean * std::log(u);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // [0, n), n > 0
    uint64_t uniform_int(uint64_t n) { return next_u64() % n; }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static uint64_t splitmix64(uint64_t& s) {
        uint64_t z = (s += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    uint64_t state_[4];
};

} // namespace lacnet
