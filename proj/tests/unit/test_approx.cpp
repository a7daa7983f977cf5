#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "pcwlab/approx.hpp"
#include "pcwlab/error.hpp"

using namespace pcwlab;

namespace {

PolicyParameters random_params(std::uint64_t seed, std::vector<std::size_t> hidden, ActionGrid grid,
                               double spread = 0.5) {
    const Dataset d = fixtures::random_dataset(64, seed, SplitTag::train);
    PolicyParameters p = PolicyParameters::initialize(grid, Normalizer::fit(d), std::move(hidden), seed);
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-spread, spread);
    for (double& w : p.actor) w += u(gen);
    for (double& w : p.critic) w += u(gen);
    return p;
}

std::vector<double> random_input(std::mt19937_64& gen) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> x(kPolicyInputDim);
    for (double& v : x) v = n(gen);
    return x;
}

}  // namespace

TEST_SUITE("approx") {

TEST_CASE("parameter layout is weights then bias per layer") {
    MlpSpec s;
    s.input_dim = 3;
    s.hidden = {4, 2};
    s.output_dim = 5;
    CHECK(s.layer_count() == 3);
    CHECK(s.layer_in(0) == 3);
    CHECK(s.layer_out(0) == 4);
    CHECK(s.layer_offset(0) == 0);
    CHECK(s.layer_offset(1) == 3 * 4 + 4);
    CHECK(s.layer_offset(2) == 16 + 4 * 2 + 2);
    CHECK(s.param_count() == 26 + 2 * 5 + 5);
    s.hidden = {0};
    CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("forward pass matches a hand-written network") {
    MlpSpec s;
    s.input_dim = 2;
    s.hidden = {2};
    s.output_dim = 2;
    // W1 = [[1, 2], [3, 4]], b1 = [0.1, -0.1], W2 = [[0.5, -1], [2, 0]], b2 = [0, 1]
    const std::vector<double> w = {1, 2, 3, 4, 0.1, -0.1, 0.5, -1, 2, 0, 0, 1};
    const std::vector<double> x = {0.2, -0.3};
    MlpWorkspace ws;
    mlp::forward_hidden(s, w, x, ws);
    mlp::forward_output(s, w, ws);
    const double h0 = std::tanh(0.2 - 0.6 + 0.1), h1 = std::tanh(0.6 - 1.2 - 0.1);
    CHECK(ws.output[0] == doctest::Approx(0.5 * h0 - h1));
    CHECK(ws.output[1] == doctest::Approx(2 * h0 + 1));
    CHECK(mlp::forward_output_one(s, w, ws, 1) == doctest::Approx(2 * h0 + 1));
}

TEST_CASE("softmax is stable and returns log-sum-exp") {
    std::vector<double> v = {1000.0, 1001.0, 999.0};
    const double lse = softmax_inplace(v);
    const double expected = 1001.0 + std::log(std::exp(-1.0) + 1.0 + std::exp(-2.0));
    CHECK(lse == doctest::Approx(expected));
    CHECK(std::accumulate(v.begin(), v.end(), 0.0) == doctest::Approx(1.0));
    CHECK(v[1] > v[0]);
    CHECK(v[0] > v[2]);
}

TEST_CASE("zero weights give a uniform policy and a zero critic") {
    const ActionGrid grid;
    const auto p = PolicyParameters::zeros(grid, Normalizer{}, {8});
    std::mt19937_64 gen(1);
    const auto x = random_input(gen);
    const auto probs = action_probabilities(p, x);
    REQUIRE(probs.size() == 601);
    for (double q : probs) CHECK(q == doctest::Approx(1.0 / 601.0));
    CHECK(critic_value(p, x, 17) == 0.0);
    CHECK(log_policy(p, x, 3) == doctest::Approx(-std::log(601.0)));
}

TEST_CASE("analytic gradients match central differences") {
    const ActionGrid grid(0.7, 1.3, 0.01);
    std::mt19937_64 gen(5);
    for (int point = 0; point < 10; ++point) {
        const auto p = random_params(100 + point, point % 2 == 0 ? std::vector<std::size_t>{8, 6}
                                                                 : std::vector<std::size_t>{5},
                                     grid);
        const auto x = random_input(gen);
        const std::size_t a = gen() % grid.count();

        const auto g_actor = grad_log_policy(p, x, a);
        REQUIRE(g_actor.size() == p.actor.size());
        auto f_actor = [&](const std::vector<double>& theta) {
            PolicyParameters q = p;
            q.actor = theta;
            return log_policy(q, x, a);
        };
        const auto coords = fixtures::sample_coords(p.actor.size(), 300, gen);
        CHECK(fixtures::gradient_relative_error(f_actor, p.actor, g_actor, coords) < 1e-4);

        const auto g_critic = grad_critic(p, x, a);
        auto f_critic = [&](const std::vector<double>& theta) {
            PolicyParameters q = p;
            q.critic = theta;
            return critic_value(q, x, a);
        };
        const auto critic_coords = fixtures::sample_coords(p.critic.size(), 300, gen);
        CHECK(fixtures::gradient_relative_error(f_critic, p.critic, g_critic, critic_coords) < 1e-4);
    }
}

TEST_CASE("critic gradient touches only the chosen output row") {
    const ActionGrid grid(0.7, 1.3, 0.01);
    const auto p = random_params(3, {6}, grid);
    std::mt19937_64 gen(3);
    const auto x = random_input(gen);
    const auto g = grad_critic(p, x, 10);
    const std::size_t off = p.critic_spec.layer_offset(1);
    const std::size_t in = p.critic_spec.layer_in(1);
    const std::size_t out = p.critic_spec.output_dim;
    for (std::size_t k = 0; k < out; ++k) {
        for (std::size_t j = 0; j < in; ++j) {
            if (k != 10) REQUIRE(g[off + k * in + j] == 0.0);
        }
        if (k != 10) REQUIRE(g[off + out * in + k] == 0.0);
    }
    CHECK(g[off + out * in + 10] == 1.0);
}

TEST_CASE("in-place backprop equals backprop into a copy") {
    const ActionGrid grid(0.7, 1.3, 0.01);
    const auto p = random_params(9, {7, 5}, grid);
    std::mt19937_64 gen(9);
    const auto x = random_input(gen);
    std::vector<double> d(grid.count());
    for (double& v : d) v = std::normal_distribution<double>(0.0, 1.0)(gen);
    MlpWorkspace ws;
    std::vector<double> w = p.actor;
    std::vector<double> copy = p.actor;
    mlp::forward_hidden(p.actor_spec, w, x, ws);
    mlp::backprop(p.actor_spec, w, ws, d, 0.01, copy);
    mlp::forward_hidden(p.actor_spec, w, x, ws);
    mlp::backprop(p.actor_spec, w, ws, d, 0.01, w);
    CHECK(w == copy);
}

TEST_CASE("Glorot initialization is deterministic, bounded and zero-biased") {
    MlpSpec s;
    s.input_dim = 10;
    s.hidden = {20};
    s.output_dim = 30;
    const auto a = mlp::glorot_init(s, 7, "init.actor");
    CHECK(a == mlp::glorot_init(s, 7, "init.actor"));
    CHECK(a != mlp::glorot_init(s, 7, "init.critic"));
    const double l0 = std::sqrt(6.0 / 30.0), l1 = std::sqrt(6.0 / 50.0);
    for (std::size_t i = 0; i < 200; ++i) CHECK(std::abs(a[i]) <= l0);
    for (std::size_t i = 200; i < 220; ++i) CHECK(a[i] == 0.0);
    for (std::size_t i = 220; i < 820; ++i) CHECK(std::abs(a[i]) <= l1);
    for (std::size_t i = 820; i < 850; ++i) CHECK(a[i] == 0.0);
}

TEST_CASE("normalizer standardizes every input column") {
    const Dataset d = fixtures::random_dataset(300, 11, SplitTag::train);
    const Normalizer n = Normalizer::fit(d);
    std::vector<double> sum(kPolicyInputDim, 0.0), sq(kPolicyInputDim, 0.0);
    for (const auto& r : d.records) {
        const auto x = n.apply(r);
        for (std::size_t i = 0; i < kPolicyInputDim; ++i) {
            sum[i] += x[i];
            sq[i] += x[i] * x[i];
        }
    }
    for (std::size_t i = 0; i < kPolicyInputDim; ++i) {
        CHECK(sum[i] / 300.0 == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        CHECK(sq[i] / 300.0 == doctest::Approx(1.0).epsilon(1e-9));
    }
    const auto x = n.apply(d.records[0]);
    CHECK(x[kFeatureCount] == doctest::Approx((d.records[0].benchmark_premium - n.mean[16]) / n.scale[16]));
    CHECK(x[kFeatureCount + 1] == doctest::Approx((d.records[0].burn_cost - n.mean[17]) / n.scale[17]));
}

TEST_CASE("policy JSON round-trips bit-exactly and rejects damage") {
    const auto p = random_params(4, {6, 3}, ActionGrid());
    const std::string text = p.to_json();
    const auto back = PolicyParameters::from_json(text);
    CHECK(back == p);
    CHECK(back.to_json() == text);
    CHECK_THROWS_AS(PolicyParameters::from_json(text.substr(0, text.size() - 20)), ArtifactError);
    CHECK_THROWS_AS(PolicyParameters::from_json("{\"version\": 99}"), ArtifactError);
    auto broken = p;
    broken.actor.pop_back();
    CHECK_THROWS_AS(PolicyParameters::from_json(broken.to_json()), ArtifactError);
    auto bad = p;
    bad.critic[0] = std::nan("");
    CHECK_THROWS_AS(bad.validate(), NumericError);
}

}
