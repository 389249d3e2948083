#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace unsolv {

/// SplitMix64 finalizer. Used for seeding and for deriving child streams.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stateless mix of two words; stable across platforms.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t s = seed ^ (stream * 0xd1b54a32d192ed03ULL);
    splitmix64(s);
    return splitmix64(s);
}

/// 64-bit FNV-1a over bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept {
    std::uint64_t h = basis;
    for (char c : bytes) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// xoshiro256** seeded through SplitMix64.
///
/// The stream is fully specified by the seed: no platform or standard-library
/// distribution is involved, so draws are identical everywhere. Seed 0 is a
/// valid seed (SplitMix64 never produces the all-zero state from it).
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Independent child stream keyed by `stream`; does not advance this generator.
    Rng split(std::uint64_t stream) const noexcept { return Rng(mix_seed(state_[0] ^ rotl(state_[2], 13), stream)); }

    /// Uniform integer in [0, bound); bound must be positive. Lemire's method with rejection.
    std::uint64_t below(std::uint64_t bound) noexcept {
        using U128 = unsigned __int128;
        U128 m = static_cast<U128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<U128>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform integer in the closed range [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(next());
        return lo + static_cast<std::int64_t>(below(span));
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) noexcept { return uniform01() < p; }

    template <typename T>
    void shuffle(std::span<T> items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    /// Index drawn proportionally to non-negative weights (at least one positive).
    std::size_t weighted_index(std::span<const double> weights) noexcept;

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
};

inline std::size_t Rng::weighted_index(std::span<const double> weights) noexcept {
    double total = 0.0;
    for (double w : weights) total += w;
    double r = uniform01() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (r < weights[i]) return i;
        r -= weights[i];
    }
    for (std::size_t i = weights.size(); i > 0; --i)
        if (weights[i - 1] > 0) return i - 1;
    return 0;
}

}  // namespace unsolv
