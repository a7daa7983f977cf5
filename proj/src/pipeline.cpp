#include "pcwlab/pipeline.hpp"

#include <sstream>

#include "pcwlab/conversion.hpp"
#include "pcwlab/error.hpp"

namespace pcwlab {

GeneratedData generate_data(const RunConfig& config) {
    const Dataset all = generate_customers(config.datagen);
    auto [train, test] = split_dataset(all, config.datagen);
    auto pool = build_training_pool(train, [](double z) { return true_conversion(z); }, config.datagen);
    return {std::move(train), std::move(test), std::move(pool)};
}

TrainedPolicy train_policy(const RunConfig& config, RewardMode mode, std::uint64_t seed, const Dataset& train,
                           const FittedConversionModel& model) {
    TrainConfig tc = config.train;
    tc.reward_mode = mode;
    tc.seed = seed;
    const std::string tag(reward_mode_name(mode));
    SimEnv env(train, model, config.grid, mode, derive_seed(seed, "train.env." + tag));
    std::ostringstream steps;
    if (config.trace_steps) env.set_trace(&steps);
    TrainedPolicy trained;
    auto init = PolicyParameters::initialize(config.grid, Normalizer::fit(train), config.hidden,
                                             derive_seed(seed, "train.init." + tag));
    trained.result = pcwlab::train(tc, env, std::move(init), [&](std::uint64_t it, const PolicyParameters& p) {
        trained.checkpoints.emplace_back(it, p.to_json());
    });
    trained.steps = std::move(steps).str();
    return trained;
}

EvaluationTrace evaluate_policies(const RunConfig& config, const PolicyParameters& sparse_policy,
                                  const PolicyParameters& dense_policy, const FittedConversionModel& model,
                                  const Dataset& test, std::uint64_t seed) {
    if (!(sparse_policy.grid == dense_policy.grid)) throw ArtifactError("policies were trained on different grids");
    const ActionGrid grid = dense_policy.grid;
    const AgentRoster roster =
        build_roster(config.roster, sparse_policy, dense_policy, model, grid, config.evaluation.quote_mode);
    const auto view = roster.view();
    EvalOptions options;
    options.seed = seed;
    options.shuffle = config.evaluation.shuffle;
    return evaluate(view, test, grid, options);
}

std::vector<AgentEntry> default_roster() {
    return {
        {"standard_rl", AgentKind::actor_critic_sparse, {}},
        {"hybrid_rl", AgentKind::actor_critic_dense, {}},
        {"unbiased_model", AgentKind::model_based, BiasScenario::unbiased()},
        {"over_estimate_model", AgentKind::model_based, BiasScenario::over()},
        {"under_estimate_model", AgentKind::model_based, BiasScenario::under()},
        {"random", AgentKind::random, {}},
        {"perfect_info", AgentKind::perfect_info, {}},
    };
}

}  // namespace pcwlab
