#pragma once

#include <cstdint>
#include <limits>

namespace hcmeta {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based SplitMix64: output n is splitmix64(key + n * golden), with the key
// derived from the seed.  Distinct seeds give independent streams, so trajectory i
// of a batch simply uses seed base + i.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed) : key_(splitmix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        ++counter_;
        return splitmix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    // Uniform on the open interval (0,1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    // Uniform integer in [0, n), Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n) {
        while (true) {
            unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
            auto low = static_cast<std::uint64_t>(m);
            if (low >= n || low >= (-n) % n) return static_cast<std::uint64_t>(m >> 64);
        }
    }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace hcmeta
