#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pcwlab/config.hpp"
#include "pcwlab/datagen.hpp"
#include "pcwlab/evaluator.hpp"
#include "pcwlab/trainer.hpp"

namespace pcwlab {

// The stages run by the command line tool, usable on their own.

struct GeneratedData {
    Dataset train;
    Dataset test;
    std::vector<ResampledQuote> pool;
};

// Customers, train/test split and the resampled pool under the analytic demand curve.
GeneratedData generate_data(const RunConfig& config);

struct TrainedPolicy {
    TrainResult result;
    std::vector<std::pair<std::uint64_t, std::string>> checkpoints;  // (iteration, policy JSON)
    std::string steps;  // JSON lines, filled only when config.trace_steps is set
};

// Environment and initial weights are seeded from seed via the stages "train.env.<mode>"
// and "train.init.<mode>".
TrainedPolicy train_policy(const RunConfig& config, RewardMode mode, std::uint64_t seed, const Dataset& train,
                           const FittedConversionModel& model);

EvaluationTrace evaluate_policies(const RunConfig& config, const PolicyParameters& sparse_policy,
                                  const PolicyParameters& dense_policy, const FittedConversionModel& model,
                                  const Dataset& test, std::uint64_t seed);

// The seven-agent roster with the standard bias scenarios.
std::vector<AgentEntry> default_roster();

}  // namespace pcwlab
