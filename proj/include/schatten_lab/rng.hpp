#pragma once

#include <cstdint>
#include <random>

namespace schatten_lab {

// Identifies one reproducible random stream. Distinct (master_seed,
// stream_index) pairs give independent streams; the same pair is bit-identical
// across runs and platforms.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

// Derives the stream for sub-experiment `tag` of `key` (trial t of experiment
// e uses derive(derive(key, e), t)).
inline StreamKey derive_stream(const StreamKey& key, std::uint64_t tag) {
    return StreamKey{key.master_seed,
                     detail::splitmix64(key.stream_index ^ detail::splitmix64(tag + 0x6a09e667f3bcc909ULL))};
}

// Seeded generator with explicit Box-Muller normals. std::normal_distribution
// is implementation-defined, mt19937_64 and this transform are not, so the
// sequences are portable.
class RandomStream {
  public:
    explicit RandomStream(const StreamKey& key) {
        const std::uint64_t a = detail::splitmix64(key.master_seed ^ 0x243f6a8885a308d3ULL);
        const std::uint64_t b = detail::splitmix64(key.stream_index ^ a);
        std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t bits() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double t = 6.283185307179586476925286766559 * uniform();
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace schatten_lab
