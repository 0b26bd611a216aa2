#pragma once
#include <cstdint>
#include <random>

namespace qwalk {

// Stateless 64-bit mixing function (splitmix64 finalizer).  Used to derive
// independent per-sample seeds and counter-based draws so that ensembles are
// reproducible no matter how samples are scheduled across workers.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Seed of the RNG stream for sample `index` of an ensemble with `base` seed.
// Documented contract: stream_seed(base, i) = mix64(base XOR (i+1)*phi64)
// where phi64 = 0x9E3779B97F4A7C15.  The +1 keeps index 0 from collapsing
// onto the base seed.
inline std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index) {
    return mix64(base ^ ((index + 1) * 0x9E3779B97F4A7C15ull));
}

// Map 64 random bits to a double uniform on [0, 1) using the top 53 bits.
// Bit-exact across platforms (no long-double or libm involvement).
inline double uniform53(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Seedable engine wrapper.  mt19937_64 has a standard-mandated output
// sequence, so identical seeds give identical draws on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_bits() { return engine_(); }
    double uniform() { return uniform53(engine_()); }
    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Coin angle uniform on [mean - width/2, mean + width/2].
    double angle(double mean, double width) { return mean + width * (uniform() - 0.5); }

  private:
    std::mt19937_64 engine_;
};

// Counter-based angle draw for per-step disorder: a pure function of
// (seed, t), so stepping needs no mutable RNG state and any step can be
// replayed in isolation.
inline double counter_angle(std::uint64_t seed, std::uint64_t t, double mean, double width) {
    return mean + width * (uniform53(mix64(seed ^ mix64(t + 0xD1B54A32D192ED03ull))) - 0.5);
}

}  // namespace qwalk
