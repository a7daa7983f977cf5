#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcwlab/approx.hpp"
#include "pcwlab/conversion.hpp"
#include "pcwlab/domain.hpp"
#include "pcwlab/rng.hpp"

namespace pcwlab {

enum class QuoteMode { stochastic, greedy };

std::string_view quote_mode_name(QuoteMode mode) noexcept;
QuoteMode parse_quote_mode(std::string_view name);

/// A pricing rule: maps a quote request to an index on the action grid. Implementations
/// are immutable after construction and safe to call concurrently.
class PricingPolicy {
public:
    virtual ~PricingPolicy() = default;
    virtual const std::string& name() const noexcept = 0;
    virtual std::size_t quote(const CustomerRecord& record, KeyedStream& stream) const = 0;
};

/// How a model-based agent misjudges the market: each quantile is multiplied by an
/// independent N(mean_scale, noise_sd) factor.
struct BiasScenario {
    double mean_scale = 1.0;
    double noise_sd = 0.3;

    static BiasScenario unbiased() { return {1.0, 0.3}; }
    static BiasScenario over() { return {1.2, 0.3}; }
    static BiasScenario under() { return {0.8, 0.3}; }
    void validate() const;
};

// Greedy: lowest index of the largest logit. Stochastic: one uniform draw inverted
// through the softmax CDF.
std::size_t select_action(std::span<const double> logits, QuoteMode mode, KeyedStream& stream);

std::size_t actor_critic_quote(const PolicyParameters& params, const CustomerRecord& record,
                               QuoteMode mode, KeyedStream& stream);

struct MarketEstimate {
    double avg_top5 = 0.0;
    double avg_top6_10 = 0.0;
};
// Redraws both factors until the estimated Avg.Top6-10 exceeds Avg.Top5 by 1e-6.
MarketEstimate estimate_market(const CustomerRecord& record, const BiasScenario& scenario,
                               KeyedStream& stream);
// Grid argmax of p_hat(z~) * (P - b) for a given market estimate.
std::size_t model_based_quote_for(const CustomerRecord& record, const MarketEstimate& estimate,
                                  const FittedConversionModel& model, const ActionGrid& grid);
std::size_t model_based_quote(const CustomerRecord& record, const BiasScenario& scenario,
                              const FittedConversionModel& model, const ActionGrid& grid,
                              KeyedStream& stream);

// Grid argmax of p(z) * (P - b) with the analytic demand curve and the true quantiles.
std::size_t perfect_info_quote(const CustomerRecord& record, const ActionGrid& grid);

std::size_t random_quote(const ActionGrid& grid, KeyedStream& stream);

class ActorCriticPolicy final : public PricingPolicy {
public:
    ActorCriticPolicy(std::string name, PolicyParameters params, QuoteMode mode);
    const std::string& name() const noexcept override { return name_; }
    std::size_t quote(const CustomerRecord& record, KeyedStream& stream) const override;
    const PolicyParameters& params() const noexcept { return params_; }

private:
    std::string name_;
    PolicyParameters params_;
    QuoteMode mode_;
};

class ModelBasedPolicy final : public PricingPolicy {
public:
    ModelBasedPolicy(std::string name, BiasScenario scenario, FittedConversionModel model,
                     ActionGrid grid);
    const std::string& name() const noexcept override { return name_; }
    std::size_t quote(const CustomerRecord& record, KeyedStream& stream) const override;

private:
    std::string name_;
    BiasScenario scenario_;
    FittedConversionModel model_;
    ActionGrid grid_;
};

class RandomPolicy final : public PricingPolicy {
public:
    explicit RandomPolicy(ActionGrid grid, std::string name = "random");
    const std::string& name() const noexcept override { return name_; }
    std::size_t quote(const CustomerRecord& record, KeyedStream& stream) const override;

private:
    std::string name_;
    ActionGrid grid_;
};

class PerfectInfoPolicy final : public PricingPolicy {
public:
    explicit PerfectInfoPolicy(ActionGrid grid, std::string name = "perfect_info");
    const std::string& name() const noexcept override { return name_; }
    std::size_t quote(const CustomerRecord& record, KeyedStream& stream) const override;

private:
    std::string name_;
    ActionGrid grid_;
};

/// The seven agents in their reporting order.
struct AgentRoster {
    std::vector<std::unique_ptr<PricingPolicy>> agents;

    std::vector<const PricingPolicy*> view() const;
};

AgentRoster standard_roster(const PolicyParameters& sparse_policy, const PolicyParameters& dense_policy,
                            const FittedConversionModel& model, const ActionGrid& grid,
                            QuoteMode mode = QuoteMode::greedy);

}  // namespace pcwlab
