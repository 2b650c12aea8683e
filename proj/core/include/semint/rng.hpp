#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace semint {

// splitmix64 finalizer; derives independent stream seeds from a master seed.
// The standard guarantees mt19937_64 output bit-for-bit, but the library
// distributions are implementation defined, so every draw below is hand
// rolled to keep reports byte-identical for a fixed seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Unbiased uniform draw from [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below requires n > 0");
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform real in [0, 1) with 53-bit resolution.
    double unit_real() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform real in the half-open interval (lo, hi].
    double in_upper_open_interval(double lo, double hi) {
        return hi - (hi - lo) * unit_real();
    }

    // Fisher-Yates shuffle with draws from this engine.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace semint
