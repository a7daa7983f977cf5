#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pcwlab/approx.hpp"
#include "pcwlab/error.hpp"
#include "pcwlab/simenv.hpp"

namespace pcwlab {

enum class LrSchedule { constant, inv_sqrt };

struct TrainConfig {
    std::uint64_t iterations = 2'000'000;
    double actor_lr = 1e-3;
    double critic_lr = 3e-4;
    LrSchedule schedule = LrSchedule::constant;
    RewardMode reward_mode = RewardMode::dense;
    std::uint64_t seed = 1;
    std::uint64_t checkpoint_every = 0;  // 0 disables checkpoints
    std::uint64_t log_every = 10'000;
    // Subtract the policy-weighted critic value from Q in the actor step.
    bool mean_q_baseline = false;

    void validate() const;
    // Learning rate for 1-based iteration m.
    double actor_rate(std::uint64_t m) const noexcept;
    double critic_rate(std::uint64_t m) const noexcept;
};

struct TrainLogRow {
    std::uint64_t iteration = 0;
    RewardMode mode = RewardMode::dense;
    double avg_reward_window = 0.0;
    double accept_rate_window = 0.0;
};

struct TrainResult {
    PolicyParameters params;
    std::vector<TrainLogRow> log;
};

// Raised when a weight leaves [-1e6, 1e6] or a value becomes non-finite. Carries the
// parameters as they were when the problem was detected.
class TrainingDiverged : public NumericError {
public:
    TrainingDiverged(const std::string& what, PolicyParameters snapshot, std::uint64_t iteration)
        : NumericError(what), snapshot_(std::move(snapshot)), iteration_(iteration) {}
    const PolicyParameters& snapshot() const noexcept { return snapshot_; }
    std::uint64_t iteration() const noexcept { return iteration_; }

private:
    PolicyParameters snapshot_;
    std::uint64_t iteration_;
};

using CheckpointSink = std::function<void(std::uint64_t iteration, const PolicyParameters&)>;

/// Values seen during one iteration, exposed for tests of the update rules.
struct IterationRecord {
    std::uint64_t iteration = 0;
    std::size_t action = 0;
    double reward = 0.0;
    double q = 0.0;
    double actor_scale = 0.0;   // gamma_a * Q (or Q minus baseline)
    double critic_scale = 0.0;  // 2 * gamma_q * (Q - R)
    bool accepted = false;
};

/// Single-sample actor-critic over a simulator. One Trainer owns its parameters and
/// workspaces and is not shared between threads.
class Trainer {
public:
    Trainer(TrainConfig config, const SimEnv& env, PolicyParameters init);

    // Runs one iteration (1-based counter m) and applies both updates.
    IterationRecord step();
    // Runs the remaining iterations up to config.iterations.
    TrainResult run(const CheckpointSink& checkpoint = {});

    const PolicyParameters& params() const noexcept { return params_; }
    std::uint64_t iterations_done() const noexcept { return done_; }

private:
    void check_weights(std::uint64_t iteration) const;

    TrainConfig config_;
    const SimEnv* env_;
    PolicyParameters params_;
    std::uint64_t done_ = 0;
    MlpWorkspace actor_ws_;
    MlpWorkspace critic_ws_;
    std::vector<double> input_;
    std::vector<double> probs_;
    std::vector<double> d_out_;
};

TrainResult train(const TrainConfig& config, const SimEnv& env, PolicyParameters init,
                  const CheckpointSink& checkpoint = {});

std::string train_log_csv(const std::vector<TrainLogRow>& log);

}  // namespace pcwlab
