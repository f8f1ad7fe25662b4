#ifndef bnvc_random_hpp
#define bnvc_random_hpp

#include <cstdint>

namespace bnvc {

// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based stream: the variate for (seed, counter) does not depend on
// any other draw, so rows can be generated in any order or in parallel.
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t seed) noexcept : key_(mix64(seed)) {}

    constexpr std::uint64_t bits(std::uint64_t counter) const noexcept { return mix64(key_ ^ mix64(counter)); }

    // uniform in [0, 1) with 53 random bits
    constexpr double uniform(std::uint64_t counter) const noexcept {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // independent child stream, e.g. one per experiment trial
    constexpr CounterRng split(std::uint64_t index) const noexcept { return CounterRng(bits(~index)); }

private:
    std::uint64_t key_;
};

} // namespace bnvc

#endif // bnvc_random_hpp
