#pragma once

#include <cmath>
#include <cstdint>

namespace rmlab {

/// SplitMix64 finalizer; maps distinct inputs to decorrelated 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Key for a child stream; chaining derive_stream(derive_stream(master, a), b)
/// gives independent streams per (a, b) pair.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t stream_id) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream_id * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
}

/// Counter-based generator: the value at counter c is a pure function of
/// (key, c), so parallel workers can skip to any position deterministically.
/// The sequential interface (next/uniform/normal) just advances the counter.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}
    CounterRng(std::uint64_t master, std::uint64_t stream_id) : key_(derive_stream(master, stream_id)) {}

    std::uint64_t key() const { return key_; }

    std::uint64_t u64_at(std::uint64_t counter) const {
        return splitmix64(key_ ^ (counter * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL));
    }

    std::uint64_t next() { return u64_at(counter_++); }

    /// Uniform on (0, 1].
    double uniform() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * (uniform() - 0x1.0p-53); }

    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// +1 or -1 with equal probability.
    double rademacher() { return (next() & 1ULL) ? 1.0 : -1.0; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace rmlab
