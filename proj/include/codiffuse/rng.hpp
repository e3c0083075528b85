#pragma once

// Counter-based random numbers.
//
// Every draw in a simulation is a pure function of (key, counter), where the
// key is derived from the master seed and the parameter set, and the counter
// names the consumer: (node or sequence index, step, channel, iteration).
// Results therefore do not depend on evaluation order or on how work is split
// across threads.

#include <array>
#include <cstdint>

namespace codiffuse::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
constexpr Counter philox4x32(Counter ctr, Key key) noexcept {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
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

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Uniform in [0, 1) with 53 bits of resolution.
constexpr double unit53(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
    return static_cast<double>(bits) * 0x1.0p-53;
}

// Uniform in [0, 1) with 32 bits of resolution.
constexpr double unit32(std::uint32_t w) noexcept {
    return static_cast<double>(w) * 0x1.0p-32;
}

// Draw channels. Each channel has its own counter space so that consumers
// never share a draw.
enum class Channel : std::uint32_t {
    Adoption = 0,
    Dormancy = 1,
    QuenchedThreshold = 2,
    Seeding = 3,
    RandomRegular = 4,
};

class StreamKey {
public:
    constexpr StreamKey() = default;
    constexpr explicit StreamKey(std::uint64_t value) : value_(value) {}

    // Key for one parameter set under a master seed.
    static constexpr StreamKey derive(std::uint64_t master_seed, std::uint64_t parameter_key) noexcept {
        return StreamKey{splitmix64(splitmix64(master_seed) ^ parameter_key)};
    }

    constexpr std::uint64_t value() const noexcept { return value_; }
    constexpr Key philox_key() const noexcept {
        return {static_cast<std::uint32_t>(value_), static_cast<std::uint32_t>(value_ >> 32)};
    }

    constexpr Counter block(std::uint32_t a, std::uint32_t b, Channel ch, std::uint32_t iteration) const noexcept {
        return philox4x32({a, b, static_cast<std::uint32_t>(ch), iteration}, philox_key());
    }

    friend constexpr bool operator==(StreamKey, StreamKey) = default;

private:
    std::uint64_t value_ = 0;
};

// Sequential generator over one (key, channel, iteration) counter space.
// Satisfies UniformRandomBitGenerator. Bounded integers are produced by
// below() rather than std::uniform_int_distribution so that output is
// identical across standard library implementations.
class Stream {
public:
    using result_type = std::uint32_t;

    Stream(StreamKey key, Channel channel, std::uint32_t iteration) noexcept
        : key_(key), channel_(channel), iteration_(iteration) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return 0xFFFFFFFFu; }

    result_type operator()() noexcept {
        if (lane_ == 4) {
            buffer_ = key_.block(static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32),
                                 channel_, iteration_);
            ++index_;
            lane_ = 0;
        }
        return buffer_[lane_++];
    }

    double uniform() noexcept {
        const std::uint32_t hi = (*this)();
        const std::uint32_t lo = (*this)();
        return unit53(hi, lo);
    }

    // Uniform integer in [0, bound). bound must be positive.
    std::uint32_t below(std::uint32_t bound) noexcept {
        // Lemire's multiply-and-reject.
        std::uint64_t m = std::uint64_t{(*this)()} * bound;
        auto low = static_cast<std::uint32_t>(m);
        if (low < bound) {
            const std::uint32_t threshold = (0u - bound) % bound;
            while (low < threshold) {
                m = std::uint64_t{(*this)()} * bound;
                low = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

private:
    StreamKey key_;
    Channel channel_;
    std::uint32_t iteration_;
    std::uint64_t index_ = 0;
    Counter buffer_{};
    int lane_ = 4;
};

}  // namespace codiffuse::rng
