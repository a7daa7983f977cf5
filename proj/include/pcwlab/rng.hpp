#pragma once

#include <cstdint>
#include <string_view>

namespace pcwlab {

// Compile-time FNV-1a, used to turn purpose strings ("train", "eval", ...) into stream tags.
constexpr std::uint64_t purpose_tag(std::string_view purpose) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : purpose) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Stateless keyed hash: the draw at (seed, tag, id, index) is a pure function of the key,
// so any single draw can be reproduced without replaying the others.
std::uint64_t keyed_bits(std::uint64_t seed, std::uint64_t tag, std::uint64_t id,
                         std::uint64_t index) noexcept;

// Maps 64 random bits to [0, 1) with 53 bits of resolution.
inline double bits_to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// A counter-based random stream. Each stream is identified by (seed, tag, id) and
/// hands out draws at consecutive indices starting from zero.
class KeyedStream {
public:
    KeyedStream(std::uint64_t seed, std::uint64_t tag, std::uint64_t id) noexcept
        : seed_(seed), tag_(tag), id_(id) {}
    KeyedStream(std::uint64_t seed, std::string_view purpose, std::uint64_t id) noexcept
        : KeyedStream(seed, purpose_tag(purpose), id) {}

    std::uint64_t next_bits() noexcept { return keyed_bits(seed_, tag_, id_, counter_++); }

    // Uniform on [0, 1).
    double uniform() noexcept { return bits_to_unit(next_bits()); }

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept;

    // Box-Muller; consumes exactly two draws.
    double normal(double mean, double sd) noexcept;

    std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t tag_;
    std::uint64_t id_;
    std::uint64_t counter_ = 0;
};

}  // namespace pcwlab
