#include "pcwlab/agents.hpp"

#include <cmath>

#include "pcwlab/error.hpp"
#include "pcwlab/kernels.hpp"

namespace pcwlab {

namespace {

constexpr double kMinEstimatedSpread = 1e-6;
constexpr int kMaxEstimateDraws = 100000;

void grid_premiums(const CustomerRecord& record, const ActionGrid& grid, std::vector<double>& out) {
    out.resize(grid.count());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = grid[k] * record.benchmark_premium;
}

}  // namespace

std::string_view quote_mode_name(QuoteMode mode) noexcept {
    return mode == QuoteMode::greedy ? "greedy" : "stochastic";
}

QuoteMode parse_quote_mode(std::string_view name) {
    if (name == "greedy") return QuoteMode::greedy;
    if (name == "stochastic") return QuoteMode::stochastic;
    throw ValidationError("quote mode must be 'greedy' or 'stochastic'");
}

void BiasScenario::validate() const {
    if (!(mean_scale > 0.0) || !(noise_sd >= 0.0) || !std::isfinite(mean_scale) ||
        !std::isfinite(noise_sd)) {
        throw ValidationError("bias scenario needs mean_scale > 0 and noise_sd >= 0");
    }
}

std::size_t select_action(std::span<const double> logits, QuoteMode mode, KeyedStream& stream) {
    if (logits.empty()) throw ValidationError("select_action: no actions");
    if (mode == QuoteMode::greedy) return kernels::argmax_first(logits);
    std::vector<double> p(logits.begin(), logits.end());
    softmax_inplace(p);
    const double u = stream.uniform();
    double cumulative = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        cumulative += p[k];
        if (u < cumulative) return k;
    }
    return p.size() - 1;
}

std::size_t actor_critic_quote(const PolicyParameters& params, const CustomerRecord& record,
                               QuoteMode mode, KeyedStream& stream) {
    const std::vector<double> input = params.normalizer.apply(record);
    return select_action(actor_logits(params, input), mode, stream);
}

MarketEstimate estimate_market(const CustomerRecord& record, const BiasScenario& scenario,
                               KeyedStream& stream) {
    for (int attempt = 0; attempt < kMaxEstimateDraws; ++attempt) {
        MarketEstimate e;
        e.avg_top5 = record.avg_top5 * stream.normal(scenario.mean_scale, scenario.noise_sd);
        e.avg_top6_10 = record.avg_top6_10 * stream.normal(scenario.mean_scale, scenario.noise_sd);
        if (e.avg_top6_10 > e.avg_top5 + kMinEstimatedSpread) return e;
    }
    throw NumericError("market estimate: could not draw an ordered estimate");
}

std::size_t model_based_quote_for(const CustomerRecord& record, const MarketEstimate& estimate,
                                  const FittedConversionModel& model, const ActionGrid& grid) {
    thread_local std::vector<double> premiums;
    thread_local std::vector<double> objective;
    grid_premiums(record, grid, premiums);
    objective.resize(premiums.size());
    const auto& k = kernels::active();
    k.fitted_objective(premiums.data(), premiums.size(), estimate.avg_top5,
                       estimate.avg_top6_10 - estimate.avg_top5, record.burn_cost,
                       model.values().data(), objective.data());
    return k.argmax_first(objective.data(), objective.size());
}

std::size_t model_based_quote(const CustomerRecord& record, const BiasScenario& scenario,
                              const FittedConversionModel& model, const ActionGrid& grid,
                              KeyedStream& stream) {
    return model_based_quote_for(record, estimate_market(record, scenario, stream), model, grid);
}

std::size_t perfect_info_quote(const CustomerRecord& record, const ActionGrid& grid) {
    const double spread = record.avg_top6_10 - record.avg_top5;
    if (!(spread > 1e-9)) throw DegenerateMarketError("perfect_info_quote: degenerate market");
    thread_local std::vector<double> premiums;
    thread_local std::vector<double> objective;
    grid_premiums(record, grid, premiums);
    objective.resize(premiums.size());
    const auto& k = kernels::active();
    k.true_objective(premiums.data(), premiums.size(), record.avg_top5, spread, record.burn_cost,
                     objective.data());
    return k.argmax_first(objective.data(), objective.size());
}

std::size_t random_quote(const ActionGrid& grid, KeyedStream& stream) {
    return static_cast<std::size_t>(stream.below(grid.count()));
}

ActorCriticPolicy::ActorCriticPolicy(std::string name, PolicyParameters params, QuoteMode mode)
    : name_(std::move(name)), params_(std::move(params)), mode_(mode) {
    params_.validate();
}

std::size_t ActorCriticPolicy::quote(const CustomerRecord& record, KeyedStream& stream) const {
    return actor_critic_quote(params_, record, mode_, stream);
}

ModelBasedPolicy::ModelBasedPolicy(std::string name, BiasScenario scenario,
                                   FittedConversionModel model, ActionGrid grid)
    : name_(std::move(name)), scenario_(scenario), model_(std::move(model)), grid_(grid) {
    scenario_.validate();
}

std::size_t ModelBasedPolicy::quote(const CustomerRecord& record, KeyedStream& stream) const {
    return model_based_quote(record, scenario_, model_, grid_, stream);
}

RandomPolicy::RandomPolicy(ActionGrid grid, std::string name) : name_(std::move(name)), grid_(grid) {}

std::size_t RandomPolicy::quote(const CustomerRecord&, KeyedStream& stream) const {
    return random_quote(grid_, stream);
}

PerfectInfoPolicy::PerfectInfoPolicy(ActionGrid grid, std::string name)
    : name_(std::move(name)), grid_(grid) {}

std::size_t PerfectInfoPolicy::quote(const CustomerRecord& record, KeyedStream&) const {
    return perfect_info_quote(record, grid_);
}

std::vector<const PricingPolicy*> AgentRoster::view() const {
    std::vector<const PricingPolicy*> out;
    out.reserve(agents.size());
    for (const auto& a : agents) out.push_back(a.get());
    return out;
}

AgentRoster standard_roster(const PolicyParameters& sparse_policy, const PolicyParameters& dense_policy,
                            const FittedConversionModel& model, const ActionGrid& grid,
                            QuoteMode mode) {
    AgentRoster roster;
    roster.agents.push_back(std::make_unique<ActorCriticPolicy>("standard_rl", sparse_policy, mode));
    roster.agents.push_back(std::make_unique<ActorCriticPolicy>("hybrid_rl", dense_policy, mode));
    roster.agents.push_back(
        std::make_unique<ModelBasedPolicy>("unbiased_model", BiasScenario::unbiased(), model, grid));
    roster.agents.push_back(
        std::make_unique<ModelBasedPolicy>("over_estimate_model", BiasScenario::over(), model, grid));
    roster.agents.push_back(
        std::make_unique<ModelBasedPolicy>("under_estimate_model", BiasScenario::under(), model, grid));
    roster.agents.push_back(std::make_unique<RandomPolicy>(grid));
    roster.agents.push_back(std::make_unique<PerfectInfoPolicy>(grid));
    return roster;
}

}  // namespace pcwlab
