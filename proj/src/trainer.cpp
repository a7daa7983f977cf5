#include "pcwlab/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "pcwlab/error.hpp"
#include "pcwlab/io.hpp"
#include "pcwlab/rng.hpp"

namespace pcwlab {

namespace {

constexpr double kWeightBound = 1e6;

}  // namespace

void TrainConfig::validate() const {
    if (!(actor_lr > 0.0) || !(critic_lr > 0.0) || !std::isfinite(actor_lr) || !std::isfinite(critic_lr)) {
        throw ValidationError("train config: learning rates must be positive");
    }
    if (log_every == 0) throw ValidationError("train config: log_every must be positive");
}

double TrainConfig::actor_rate(std::uint64_t m) const noexcept {
    return schedule == LrSchedule::inv_sqrt ? actor_lr / std::sqrt(static_cast<double>(m)) : actor_lr;
}

double TrainConfig::critic_rate(std::uint64_t m) const noexcept {
    return schedule == LrSchedule::inv_sqrt ? critic_lr / std::sqrt(static_cast<double>(m)) : critic_lr;
}

Trainer::Trainer(TrainConfig config, const SimEnv& env, PolicyParameters init)
    : config_(config), env_(&env), params_(std::move(init)) {
    config_.validate();
    params_.validate();
    if (config_.reward_mode != env.mode()) {
        throw ValidationError("train config reward mode differs from the simulator's");
    }
    if (!(params_.grid == env.grid())) throw ValidationError("policy grid differs from the simulator's");
    input_.resize(kPolicyInputDim);
    probs_.resize(params_.grid.count());
    d_out_.resize(params_.grid.count());
}

IterationRecord Trainer::step() {
    const std::uint64_t m = ++done_;
    IterationRecord rec;
    rec.iteration = m;

    const CustomerRecord& customer = env_->customer(m);
    params_.normalizer.apply(customer, input_);

    mlp::forward_hidden(params_.actor_spec, params_.actor, input_, actor_ws_);
    mlp::forward_output(params_.actor_spec, params_.actor, actor_ws_);
    std::copy(actor_ws_.output.begin(), actor_ws_.output.end(), probs_.begin());
    softmax_inplace(probs_);

    KeyedStream action_stream(env_->seed(), "train.action", m);
    const double u = action_stream.uniform();
    std::size_t action = probs_.size() - 1;
    double cumulative = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k) {
        cumulative += probs_[k];
        if (u < cumulative) {
            action = k;
            break;
        }
    }
    rec.action = action;

    const EnvStep outcome = env_->step(customer, action, m);
    rec.accepted = outcome.accepted;
    rec.reward = outcome.reward(config_.reward_mode);

    mlp::forward_hidden(params_.critic_spec, params_.critic, input_, critic_ws_);
    double actor_signal = 0.0;
    if (config_.mean_q_baseline) {
        mlp::forward_output(params_.critic_spec, params_.critic, critic_ws_);
        rec.q = critic_ws_.output[action];
        double baseline = 0.0;
        for (std::size_t k = 0; k < probs_.size(); ++k) baseline += probs_[k] * critic_ws_.output[k];
        actor_signal = rec.q - baseline;
    } else {
        rec.q = mlp::forward_output_one(params_.critic_spec, params_.critic, critic_ws_, action);
        actor_signal = rec.q;
    }
    if (!std::isfinite(rec.q) || !std::isfinite(rec.reward)) {
        throw TrainingDiverged("non-finite critic value or reward at iteration " + std::to_string(m),
                               params_, m);
    }

    // theta_q <- theta_q - 2 gamma_q (Q - R) grad Q
    rec.critic_scale = 2.0 * config_.critic_rate(m) * (rec.q - rec.reward);
    mlp::backprop_one(params_.critic_spec, params_.critic, critic_ws_, action, 1.0, -rec.critic_scale,
                      params_.critic);

    // theta_a <- theta_a + gamma_a Q grad log pi(A|x); grad wrt logits is e_A - pi.
    rec.actor_scale = config_.actor_rate(m) * actor_signal;
    for (std::size_t k = 0; k < probs_.size(); ++k) d_out_[k] = -probs_[k];
    d_out_[action] += 1.0;
    mlp::backprop(params_.actor_spec, params_.actor, actor_ws_, d_out_, rec.actor_scale, params_.actor);
    return rec;
}

void Trainer::check_weights(std::uint64_t iteration) const {
    auto bad = [](const std::vector<double>& w) {
        return std::any_of(w.begin(), w.end(),
                           [](double v) { return !std::isfinite(v) || std::abs(v) > kWeightBound; });
    };
    if (bad(params_.actor) || bad(params_.critic)) {
        throw TrainingDiverged("weights diverged by iteration " + std::to_string(iteration), params_,
                               iteration);
    }
}

TrainResult Trainer::run(const CheckpointSink& checkpoint) {
    TrainResult result;
    double reward_sum = 0.0;
    std::uint64_t accepted = 0;
    std::uint64_t window = 0;
    auto flush = [&](std::uint64_t iteration) {
        if (window == 0) return;
        result.log.push_back({iteration, config_.reward_mode, reward_sum / static_cast<double>(window),
                              static_cast<double>(accepted) / static_cast<double>(window)});
        reward_sum = 0.0;
        accepted = 0;
        window = 0;
    };
    while (done_ < config_.iterations) {
        const IterationRecord rec = step();
        reward_sum += rec.reward;
        accepted += rec.accepted ? 1 : 0;
        ++window;
        if (rec.iteration % config_.log_every == 0) {
            check_weights(rec.iteration);
            flush(rec.iteration);
        }
        if (config_.checkpoint_every != 0 && rec.iteration % config_.checkpoint_every == 0 && checkpoint) {
            checkpoint(rec.iteration, params_);
        }
    }
    flush(done_);
    check_weights(done_);
    result.params = params_;
    return result;
}

TrainResult train(const TrainConfig& config, const SimEnv& env, PolicyParameters init,
                  const CheckpointSink& checkpoint) {
    Trainer trainer(config, env, std::move(init));
    return trainer.run(checkpoint);
}

std::string train_log_csv(const std::vector<TrainLogRow>& log) {
    std::string out = "iteration,mode,avg_reward_window,accept_rate_window\n";
    for (const auto& row : log) {
        out += std::to_string(row.iteration);
        out += ',';
        out += reward_mode_name(row.mode);
        out += ',';
        io::append_g17(out, row.avg_reward_window);
        out += ',';
        io::append_g17(out, row.accept_rate_window);
        out += '\n';
    }
    return out;
}

}  // namespace pcwlab
