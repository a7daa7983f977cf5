#include <array>
#include <cmath>
#include <set>

#include "doctest.h"
#include "pcwlab/rng.hpp"

using namespace pcwlab;

TEST_SUITE("rng") {

TEST_CASE("purpose tags match published FNV-1a 64 vectors") {
    static_assert(purpose_tag("") == 0xcbf29ce484222325ULL);
    CHECK(purpose_tag("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(purpose_tag("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("keyed draws are pure functions of the key") {
    CHECK(keyed_bits(1, 2, 3, 4) == keyed_bits(1, 2, 3, 4));
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 4; ++s)
        for (std::uint64_t t = 0; t < 4; ++t)
            for (std::uint64_t id = 0; id < 4; ++id)
                for (std::uint64_t i = 0; i < 4; ++i) seen.insert(keyed_bits(s, t, id, i));
    CHECK(seen.size() == 256);
}

TEST_CASE("a stream replays keyed_bits at consecutive indices") {
    KeyedStream s(11, "train", 5);
    for (std::uint64_t i = 0; i < 10; ++i) CHECK(s.next_bits() == keyed_bits(11, purpose_tag("train"), 5, i));
    CHECK(s.position() == 10);
}

TEST_CASE("uniform draws lie in [0, 1) with the right mean and variance") {
    KeyedStream s(3, "u", 0);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sq += u * u;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(sq / n - mean * mean - 1.0 / 12.0) < 2e-3);
    CHECK(bits_to_unit(~0ULL) < 1.0);
    CHECK(bits_to_unit(0) == 0.0);
}

TEST_CASE("below(n) is uniform on its range") {
    KeyedStream s(4, "below", 0);
    constexpr int k = 10;
    const int n = 100000;
    std::array<int, k> counts{};
    for (int i = 0; i < n; ++i) {
        const auto v = s.below(k);
        REQUIRE(v < k);
        ++counts[v];
    }
    double chi2 = 0.0;
    const double expected = static_cast<double>(n) / k;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 27.88);  // chi-square(9) upper 0.001 quantile
    CHECK(s.below(1) == 0);
}

TEST_CASE("normal draws have the requested moments and consume two draws") {
    KeyedStream s(5, "normal", 0);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s.normal(2.0, 3.0);
        sum += x;
        sq += x * x;
    }
    CHECK(s.position() == 2ULL * n);
    const double mean = sum / n;
    CHECK(std::abs(mean - 2.0) < 5.0 * 3.0 / std::sqrt(n));
    CHECK(std::abs(std::sqrt(sq / n - mean * mean) - 3.0) < 0.03);
}

}
