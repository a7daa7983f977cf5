#pragma once

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "pcwlab/kernels.hpp"
#include "pcwlab/trainer.hpp"

namespace fixtures {

// Hand-written single-hidden-layer forward pass, summing in index order.
struct ToyForward {
    std::vector<double> h;
    std::vector<double> out;
};

inline ToyForward toy_forward(const std::vector<double>& w, std::size_t in, std::size_t hidden, std::size_t out,
                              const std::vector<double>& x) {
    ToyForward f;
    const double* w1 = w.data();
    const double* b1 = w1 + hidden * in;
    const double* w2 = b1 + hidden;
    const double* b2 = w2 + out * hidden;
    f.h.resize(hidden);
    for (std::size_t j = 0; j < hidden; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < in; ++i) s += w1[j * in + i] * x[i];
        f.h[j] = std::tanh(s + b1[j]);
    }
    f.out.resize(out);
    for (std::size_t k = 0; k < out; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < hidden; ++j) s += w2[k * hidden + j] * f.h[j];
        f.out[k] = s + b2[k];
    }
    return f;
}

struct ToyResult {
    bool actor_bitwise = false;
    bool critic_bitwise = false;
    bool q_matches = false;
    std::string detail;
};

// Runs one trainer iteration on a one-hidden-layer network and compares the new weights
// with the update rules applied by hand:
//   critic: theta_q - 2 gamma_q (Q - R) dQ/dtheta_q
//   actor:  theta_a + gamma_a Q dlog pi(A)/dtheta_a
inline ToyResult check_toy_update(pcwlab::RewardMode mode, std::uint64_t seed) {
    using namespace pcwlab;
    kernels::ScopedBackend scalar(kernels::Backend::scalar);
    const ActionGrid grid(0.9, 1.1, 0.05);
    const std::size_t hidden = 3;
    const std::size_t in = kPolicyInputDim;
    const std::size_t out = grid.count();
    const Dataset data = random_dataset(4, seed, SplitTag::train);
    PolicyParameters init = PolicyParameters::initialize(grid, Normalizer::fit(data), {hidden}, seed);
    for (std::size_t i = 0; i < init.critic.size(); ++i) init.critic[i] += 0.37 * std::sin(1.0 + i);
    for (std::size_t i = 0; i < init.actor.size(); ++i) init.actor[i] += 0.21 * std::cos(2.0 + i);

    const SimEnv env(data, binned_truth(), grid, mode, seed + 1);
    TrainConfig config;
    config.iterations = 1;
    config.actor_lr = 0.013;
    config.critic_lr = 0.0071;
    config.reward_mode = mode;
    config.seed = seed;
    Trainer trainer(config, env, init);
    const IterationRecord rec = trainer.step();

    // Hand computation.
    const CustomerRecord& customer = env.customer(1);
    const std::vector<double> x = init.normalizer.apply(customer);
    const ToyForward actor = toy_forward(init.actor, in, hidden, out, x);
    std::vector<double> pi = actor.out;
    double mx = pi[0];
    for (double v : pi) mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : pi) {
        v = std::exp(v - mx);
        sum += v;
    }
    const double inv = 1.0 / sum;
    for (double& v : pi) v *= inv;

    const double u = KeyedStream(env.seed(), "train.action", 1).uniform();
    std::size_t a = out - 1;
    double cdf = 0.0;
    for (std::size_t k = 0; k < out; ++k) {
        cdf += pi[k];
        if (u < cdf) {
            a = k;
            break;
        }
    }
    const double r = env.step(customer, a, 1).reward(mode);
    const ToyForward critic = toy_forward(init.critic, in, hidden, out, x);
    const double q = critic.out[a];

    std::vector<double> theta_q = init.critic;
    {
        const double c = 2.0 * config.critic_lr * (q - r);
        double* w1 = theta_q.data();
        double* b1 = w1 + hidden * in;
        double* w2 = b1 + hidden;
        double* b2 = w2 + out * hidden;
        const double* w2_old = init.critic.data() + hidden * in + hidden;
        for (std::size_t j = 0; j < hidden; ++j) {
            const double delta = w2_old[a * hidden + j] * (1.0 - critic.h[j] * critic.h[j]);
            for (std::size_t i = 0; i < in; ++i) w1[j * in + i] = w1[j * in + i] - c * (delta * x[i]);
            b1[j] = b1[j] - c * delta;
        }
        for (std::size_t j = 0; j < hidden; ++j) w2[a * hidden + j] = w2[a * hidden + j] - c * critic.h[j];
        b2[a] = b2[a] - c;
    }

    std::vector<double> theta_a = init.actor;
    {
        const double s = config.actor_lr * q;
        std::vector<double> g(out);
        for (std::size_t k = 0; k < out; ++k) g[k] = k == a ? 1.0 - pi[k] : -pi[k];
        double* w1 = theta_a.data();
        double* b1 = w1 + hidden * in;
        double* w2 = b1 + hidden;
        double* b2 = w2 + out * hidden;
        const double* w2_old = init.actor.data() + hidden * in + hidden;
        for (std::size_t j = 0; j < hidden; ++j) {
            double back = 0.0;
            for (std::size_t k = 0; k < out; ++k) back += g[k] * w2_old[k * hidden + j];
            const double delta = back * (1.0 - actor.h[j] * actor.h[j]);
            for (std::size_t i = 0; i < in; ++i) w1[j * in + i] = w1[j * in + i] + s * (delta * x[i]);
            b1[j] = b1[j] + s * delta;
        }
        for (std::size_t k = 0; k < out; ++k) {
            for (std::size_t j = 0; j < hidden; ++j) w2[k * hidden + j] = w2[k * hidden + j] + s * (g[k] * actor.h[j]);
            b2[k] = b2[k] + s * g[k];
        }
    }

    auto same = [](const std::vector<double>& x1, const std::vector<double>& x2) {
        return x1.size() == x2.size() && std::memcmp(x1.data(), x2.data(), x1.size() * sizeof(double)) == 0;
    };
    ToyResult result;
    result.q_matches = rec.q == q && rec.action == a && rec.reward == r;
    result.critic_bitwise = same(trainer.params().critic, theta_q);
    result.actor_bitwise = same(trainer.params().actor, theta_a);
    result.detail = "action " + std::to_string(a) + ", reward " + std::to_string(r) + ", Q " + std::to_string(q);
    return result;
}

}  // namespace fixtures
