#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "pcwlab/error.hpp"
#include "pcwlab/simenv.hpp"

using namespace pcwlab;

TEST_SUITE("simenv") {

TEST_CASE("reward modes parse by name") {
    CHECK(parse_reward_mode("dense") == RewardMode::dense);
    CHECK(parse_reward_mode("sparse") == RewardMode::sparse);
    CHECK(reward_mode_name(RewardMode::sparse) == "sparse");
    CHECK_THROWS_AS(parse_reward_mode("Dense"), ValidationError);
}

TEST_CASE("a step prices, scores and settles one quote") {
    const auto model = fixtures::binned_truth();
    const ActionGrid grid;
    const auto r = fixtures::make_record(5, 400.0, 500.0, 420.0, 300.0);
    KeyedStream s(1, "t", 0);
    const EnvStep e = step(r, 250, grid, model, s);
    const double premium = 420.0 * grid[250];
    const double z = (premium - 400.0) / 100.0;
    CHECK(e.premium == premium);
    CHECK(e.z.z == doctest::Approx(z));
    CHECK(e.p_hat == model(z));
    KeyedStream replay(1, "t", 0);
    const double u = (static_cast<double>(replay.next_bits() >> 11) + 0.5) * 0x1.0p-53;
    CHECK(e.u == u);
    CHECK(e.accepted == (u <= e.p_hat));
    CHECK(e.dense_reward == doctest::Approx(e.p_hat * (premium - 300.0)));
    CHECK(e.sparse_reward == (e.accepted ? premium - 300.0 : 0.0));
    CHECK(e.reward(RewardMode::dense) == e.dense_reward);
    CHECK_THROWS_AS(step(r, 601, grid, model, s), BoundsError);
}

TEST_CASE("acceptance frequency matches the model probability") {
    const auto model = fixtures::binned_truth();
    const ActionGrid grid;
    const auto r = fixtures::make_record(5, 400.0, 500.0, 380.0, 300.0);
    const std::size_t action = 100;
    const int n = 200000;
    int accepted = 0;
    double p = 0.0;
    for (int i = 0; i < n; ++i) {
        KeyedStream s(2, "freq", static_cast<std::uint64_t>(i));
        const EnvStep e = step(r, action, grid, model, s);
        p = e.p_hat;
        accepted += e.accepted ? 1 : 0;
    }
    REQUIRE(p > 0.0);
    const double se = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(static_cast<double>(accepted) / n - p) < 4.0 * se);
}

TEST_CASE("dense reward is the mean of sparse rewards") {
    const auto model = fixtures::binned_truth();
    const ActionGrid grid;
    const Dataset d = fixtures::random_dataset(10, 3, SplitTag::train);
    for (std::size_t c = 0; c < d.size(); ++c) {
        const std::size_t action = (c * 59) % grid.count();
        const int n = 20000;
        double sum = 0.0, sq = 0.0, dense = 0.0;
        for (int i = 0; i < n; ++i) {
            KeyedStream s(4, "tower", c * 100000 + static_cast<std::uint64_t>(i));
            const EnvStep e = step(d.records[c], action, grid, model, s);
            sum += e.sparse_reward;
            sq += e.sparse_reward * e.sparse_reward;
            dense = e.dense_reward;
        }
        const double mean = sum / n;
        const double se = std::sqrt(std::max(sq / n - mean * mean, 0.0) / n);
        CAPTURE(c);
        CHECK(std::abs(mean - dense) <= 4.0 * se + 1e-12);
    }
}

TEST_CASE("simulator draws are keyed by iteration") {
    const Dataset d = fixtures::random_dataset(20, 8, SplitTag::train);
    const SimEnv env(d, fixtures::binned_truth(), ActionGrid(), RewardMode::sparse, 77);
    CHECK(env.customer(5).id == env.customer(5).id);
    const auto a = env.step(env.customer(9), 123, 9);
    const auto b = env.step(env.customer(9), 123, 9);
    CHECK(a.u == b.u);
    CHECK(a.accepted == b.accepted);
    CHECK(env.step(env.customer(9), 123, 10).u != a.u);
}

TEST_CASE("customers are sampled uniformly with replacement") {
    const Dataset d = fixtures::random_dataset(8, 8, SplitTag::train);
    const SimEnv env(d, fixtures::binned_truth(), ActionGrid(), RewardMode::dense, 3);
    std::vector<int> counts(8, 0);
    const int n = 80000;
    for (int m = 1; m <= n; ++m) ++counts[static_cast<std::size_t>(env.customer(m).id)];
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - n / 8.0) * (c - n / 8.0) / (n / 8.0);
    CHECK(chi2 < 24.32);  // chi-square(7) upper 0.001 quantile
    const Dataset empty;
    CHECK_THROWS_AS(SimEnv(empty, fixtures::binned_truth(), ActionGrid(), RewardMode::dense, 3), ValidationError);
}

TEST_CASE("the optional trace records one JSON line per step") {
    const Dataset d = fixtures::random_dataset(4, 8, SplitTag::train);
    SimEnv env(d, fixtures::binned_truth(), ActionGrid(), RewardMode::dense, 3);
    std::ostringstream out;
    env.set_trace(&out);
    for (std::uint64_t m = 1; m <= 3; ++m) env.step(env.customer(m), 300, m);
    std::istringstream lines(out.str());
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("premium"));
        ++count;
    }
    CHECK(count == 3);
}

}
