#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace chpt {

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11). Maps a
/// 128-bit counter under a 64-bit key to 128 pseudo-random bits.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter encrypt(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Identity of a reproducible random stream. Draw k of stream (seed, id) is a
/// pure function of (seed, id, k): the seed is the cipher key and the stream
/// id fills the upper half of the counter.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Sequential standard-normal draws from one stream via Box-Muller. Each
/// cipher block yields two 52-bit uniforms on the open interval (0, 1) and
/// hence two normals; normal k always comes from block k/2.
class NormalSampler {
public:
    explicit NormalSampler(RngStream stream)
        : key_{static_cast<std::uint32_t>(stream.seed), static_cast<std::uint32_t>(stream.seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream.stream_id)),
          stream_hi_(static_cast<std::uint32_t>(stream.stream_id >> 32)) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const auto bits = Philox4x32::encrypt(
            {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), stream_lo_, stream_hi_},
            key_);
        ++block_;
        const double u1 = to_open_unit(bits[0], bits[1]);
        const double u2 = to_open_unit(bits[2], bits[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

    // Midpoint of one of 2^52 equal cells, so strictly inside (0, 1).
    static double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t k = (std::uint64_t{hi} << 20) | (lo >> 12);
        return (static_cast<double>(k) + 0.5) * 0x1.0p-52;
    }

private:
    Philox4x32::Key key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    std::uint64_t block_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// `count` iid N(0,1) draws from the start of `rng`.
std::vector<double> gaussian_draws(RngStream rng, std::size_t count);

}  // namespace chpt
