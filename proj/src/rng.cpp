#include "pcwlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace pcwlab {

namespace {

constexpr std::uint64_t splitmix(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t keyed_bits(std::uint64_t seed, std::uint64_t tag, std::uint64_t id,
                         std::uint64_t index) noexcept {
    std::uint64_t h = splitmix(seed);
    h = splitmix(h ^ tag);
    h = splitmix(h ^ id);
    h = splitmix(h ^ index);
    return splitmix(h);
}

std::uint64_t KeyedStream::below(std::uint64_t n) noexcept {
    const unsigned __int128 wide = static_cast<unsigned __int128>(next_bits()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
}

double KeyedStream::normal(double mean, double sd) noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * radius * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace pcwlab
