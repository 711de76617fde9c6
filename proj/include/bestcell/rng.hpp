#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace bestcell::rng {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The output is a pure function of (key, counter), so any sample of a
/// simulation can be regenerated without touching the others.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox4x32(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    Counter operator()(Counter ctr) const {
        Key key = key_;
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, key);
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static Counter single_round(const Counter& c, const Key& k) {
        const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
        return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }

    Key key_;
};

/// Sequential draws for one simulation sample: counter = (sample, draw block).
class SampleStream {
public:
    SampleStream(const Philox4x32& engine, std::uint64_t sample) : engine_(engine), sample_(sample) {}

    /// Uniform double in (0, 1], 53 random bits.
    double uniform() {
        if (cursor_ == 2) refill();
        const std::uint64_t bits = words_[cursor_++];
        return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
    }

    /// Pair of independent standard normals (Box-Muller).
    std::array<double, 2> normal_pair() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

private:
    void refill() {
        const auto out = engine_({static_cast<std::uint32_t>(sample_), static_cast<std::uint32_t>(sample_ >> 32),
                                  block_++, 0u});
        words_[0] = (std::uint64_t{out[0]} << 32) | out[1];
        words_[1] = (std::uint64_t{out[2]} << 32) | out[3];
        cursor_ = 0;
    }

    const Philox4x32& engine_;
    std::uint64_t sample_;
    std::uint32_t block_ = 0;
    std::array<std::uint64_t, 2> words_{};
    int cursor_ = 2;
};

}  // namespace bestcell::rng
