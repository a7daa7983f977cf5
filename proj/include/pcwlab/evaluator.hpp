#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcwlab/agents.hpp"
#include "pcwlab/conversion.hpp"
#include "pcwlab/domain.hpp"

namespace pcwlab {

struct AgentQuote {
    std::size_t action = 0;
    double premium = 0.0;
    double z = 0.0;
    double p_true = 0.0;
    double expected_reward = 0.0;
    double realised_reward = 0.0;
    bool accepted = false;
};

/// Per-customer, per-agent outcomes from one evaluation run. Row t holds one shared
/// variate u[t] and one AgentQuote per agent.
struct EvaluationTrace {
    std::vector<std::string> agents;
    std::vector<std::int64_t> customer_ids;
    std::vector<double> u;
    std::vector<AgentQuote> quotes;  // row-major: quotes[t * agents.size() + i]

    std::size_t customers() const noexcept { return customer_ids.size(); }
    const AgentQuote& at(std::size_t t, std::size_t agent) const {
        return quotes[t * agents.size() + agent];
    }
};

struct EvalOptions {
    std::uint64_t seed = 1;
    // Visit customers in a keyed random order instead of dataset order.
    bool shuffle = false;
};

// Realised reward uses acceptance u <= p. Throws BoundsError naming the agent if any
// quote falls outside the grid.
EvaluationTrace evaluate(std::span<const PricingPolicy* const> agents, const Dataset& test,
                         const ConversionCurve& true_model, const ActionGrid& grid,
                         const EvalOptions& options);
EvaluationTrace evaluate(std::span<const PricingPolicy* const> agents, const Dataset& test,
                         const ActionGrid& grid, const EvalOptions& options);

struct CumulativeCurves {
    std::vector<std::string> agents;
    std::vector<std::vector<double>> expected;  // [agent][t]
    std::vector<std::vector<double>> realised;
};

CumulativeCurves cumulative_curves(const EvaluationTrace& trace);

struct SummaryRow {
    std::string agent;
    double cum_expected = 0.0;
    double cum_realised = 0.0;
    double acceptance_rate = 0.0;
    double avg_accepted_premium = 0.0;  // NaN when nothing was accepted
    std::size_t rank = 0;               // 1 = highest cumulative expected reward
};

// One row per agent in roster order; rank is by cumulative expected reward.
std::vector<SummaryRow> summarize(const EvaluationTrace& trace);
std::vector<std::string> rank_order(const std::vector<SummaryRow>& rows);

std::string trace_csv(const EvaluationTrace& trace);
std::string curves_csv(const CumulativeCurves& curves);
// Parses curves_csv output; throws ArtifactError on malformed input.
CumulativeCurves curves_from_csv(const std::string& text);
std::string ranking_table(const std::vector<SummaryRow>& rows);

}  // namespace pcwlab
