#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace iavns {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// SplitMix64 as a UniformRandomBitGenerator, cheap enough to seed per cell or
// per point from a hash. Feeds the std:: distributions.
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix64_mix(state_);
    }

private:
    std::uint64_t state_;
};

inline constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return splitmix64_mix(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

inline constexpr std::uint64_t hash_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = splitmix64_mix(seed);
    for (auto p : parts) h = hash_combine(h, p);
    return h;
}

// FNV-1a, used to turn stream names into hash parts.
inline constexpr std::uint64_t stream_id(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Independent generator for a named sub-stream of a run seed.
inline SplitMix64 substream(std::uint64_t seed, std::string_view name) {
    return SplitMix64(hash_seed(seed, {stream_id(name)}));
}

// Seed of run `index` in a campaign started from `master`.
inline std::uint64_t derive_run_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64_mix(master + 0x9e3779b97f4a7c15ULL * (index + 1));
}

}  // namespace iavns
