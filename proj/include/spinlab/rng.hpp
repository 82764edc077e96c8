// Deterministic random streams. Every source of randomness in the project is a
// named stream derived from (master seed, purpose tag, key) through splitmix64,
// so one source can be varied while the others stay frozen, and replays are
// bit-identical on the same build.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace spinlab {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Stream purposes. Tag values are part of the file-format/replay contract.
enum class Purpose : uint64_t {
    Couplings = 1,
    Clocks    = 2,
    Coins     = 3,
    InitSpins = 4,
    Colors    = 5,
    Scratch   = 6,
};

inline uint64_t mix_seed(uint64_t master, uint64_t salt) {
    return splitmix64(master ^ splitmix64(salt));
}

inline uint64_t purpose_seed(uint64_t master, Purpose p, uint64_t key = 0) {
    return mix_seed(mix_seed(master, static_cast<uint64_t>(p)), key);
}

// Replica i of an experiment with master seed m runs on replica_seed(m, i).
inline uint64_t replica_seed(uint64_t master, uint64_t replica_index) {
    return mix_seed(master, 0xC0FFEEull + replica_index);
}

// xoshiro256** with hand-rolled distributions: no reliance on
// implementation-defined std:: distribution algorithms.
class RngStream {
  public:
    explicit RngStream(uint64_t seed = 0) {
        uint64_t s = seed;
        for (auto& w : state_) {
            s = splitmix64(s);
            w = s;
        }
        have_gauss_ = false;
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

    // uniform in [0,1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in (0,1], safe as a log argument
    double uniform_pos() { return 1.0 - uniform01(); }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    double gaussian() {
        if (have_gauss_) {
            have_gauss_ = false;
            return cached_gauss_;
        }
        const double u = uniform_pos();
        const double v = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        cached_gauss_ = r * std::sin(a);
        have_gauss_ = true;
        return r * std::cos(a);
    }

    double gaussian(double mean, double sd) { return mean + sd * gaussian(); }

    // fair coin in {-1,+1}
    int coin_pm1() { return (next_u64() >> 63) ? +1 : -1; }

    bool bernoulli(double p) { return uniform01() < p; }

    // uniform integer in [0, n)
    uint64_t below(uint64_t n) {
        // multiply-shift; bias is < 2^-64 per draw, irrelevant at our scales
        return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<uint64_t, 4> state_;
    double cached_gauss_ = 0.0;
    bool have_gauss_ = false;
};

}  // namespace spinlab
