#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pcwlab/agents.hpp"
#include "pcwlab/datagen.hpp"
#include "pcwlab/domain.hpp"
#include "pcwlab/trainer.hpp"

namespace pcwlab {

enum class AgentKind { actor_critic_sparse, actor_critic_dense, model_based, random, perfect_info };

struct AgentEntry {
    std::string name;
    AgentKind kind = AgentKind::random;
    BiasScenario scenario;  // model_based only
};

struct EvalSettings {
    QuoteMode quote_mode = QuoteMode::greedy;
    bool shuffle = false;
};

/// Everything a pipeline run needs. Loaded from a JSON file that may contain comments;
/// every key is required so that a run is fully described by its config file.
struct RunConfig {
    std::uint64_t seed = 0;
    GenConfig datagen;
    ActionGrid grid;
    TrainConfig train;  // reward_mode and seed are set per run
    std::vector<std::size_t> hidden = {64, 64};
    bool trace_steps = false;
    EvalSettings evaluation;
    std::vector<AgentEntry> roster;
    std::string text_hash;  // FNV-1a of the config file bytes

    // Throws ConfigError naming the missing or invalid key.
    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::filesystem::path& path);
};

// Seeds for each stage, derived from the global seed so runs stay reproducible.
std::uint64_t derive_seed(std::uint64_t global, std::string_view stage) noexcept;

AgentRoster build_roster(const std::vector<AgentEntry>& entries, const PolicyParameters& sparse_policy,
                         const PolicyParameters& dense_policy, const FittedConversionModel& model,
                         const ActionGrid& grid, QuoteMode mode);

}  // namespace pcwlab
