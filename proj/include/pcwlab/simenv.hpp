#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "pcwlab/conversion.hpp"
#include "pcwlab/domain.hpp"
#include "pcwlab/rng.hpp"

namespace pcwlab {

enum class RewardMode { sparse, dense };

std::string_view reward_mode_name(RewardMode mode) noexcept;
// Throws ValidationError for anything other than "sparse" or "dense".
RewardMode parse_reward_mode(std::string_view name);

/// One simulated quote: the customer decides by comparing u against the fitted
/// conversion probability at the quote's normalized price.
struct EnvStep {
    CustomerRecord record;
    std::size_t action_index = 0;
    double premium = 0.0;
    NormalizedPrice z;
    double p_hat = 0.0;
    double u = 0.0;
    bool accepted = false;
    double sparse_reward = 0.0;
    double dense_reward = 0.0;

    double reward(RewardMode mode) const noexcept {
        return mode == RewardMode::dense ? dense_reward : sparse_reward;
    }
};

std::string env_step_to_json(const EnvStep& step);

// Uniform with replacement. Throws ValidationError on an empty dataset.
const CustomerRecord& sample_customer(const Dataset& data, KeyedStream& stream);

// u is drawn from the stream as an open-interval variate in (0, 1).
EnvStep step(const CustomerRecord& record, std::size_t action_index, const ActionGrid& grid,
             const FittedConversionModel& model, KeyedStream& stream);

/// Training environment over a fixed dataset and fitted conversion model. Every draw is
/// keyed by the iteration counter, so any iteration can be replayed on its own.
class SimEnv {
public:
    SimEnv(const Dataset& train, FittedConversionModel model, ActionGrid grid, RewardMode mode,
           std::uint64_t seed);

    const CustomerRecord& customer(std::uint64_t iteration) const;
    EnvStep step(const CustomerRecord& record, std::size_t action_index, std::uint64_t iteration) const;

    RewardMode mode() const noexcept { return mode_; }
    const ActionGrid& grid() const noexcept { return grid_; }
    const FittedConversionModel& model() const noexcept { return model_; }
    const Dataset& dataset() const noexcept { return *train_; }
    std::uint64_t seed() const noexcept { return seed_; }

    // Optional JSON-lines log of every step; null disables it.
    void set_trace(std::ostream* out) noexcept { trace_ = out; }

private:
    const Dataset* train_;
    FittedConversionModel model_;
    ActionGrid grid_;
    RewardMode mode_;
    std::uint64_t seed_;
    std::ostream* trace_ = nullptr;
};

}  // namespace pcwlab
