#include "pcwlab/config.hpp"

#include "json.hpp"
#include "pcwlab/error.hpp"
#include "pcwlab/io.hpp"
#include "pcwlab/rng.hpp"

namespace pcwlab {

namespace {

using nlohmann::json;

const json& require(const json& parent, const std::string& path, const std::string& key) {
    const std::string full = path.empty() ? key : path + "." + key;
    if (!parent.is_object() || !parent.contains(key)) throw ConfigError(full, "missing config key '" + full + "'");
    return parent.at(key);
}

template <typename T>
T get(const json& parent, const std::string& path, const std::string& key) {
    const json& v = require(parent, path, key);
    const std::string full = path.empty() ? key : path + "." + key;
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(full, "config key '" + full + "' must be a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
                throw ConfigError(full, "config key '" + full + "' must be a non-negative integer");
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(full, "config key '" + full + "' must be a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(full, "config key '" + full + "' must be a string");
        }
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(full, "config key '" + full + "' has the wrong type");
    }
}

AgentKind parse_kind(const std::string& kind, const std::string& key) {
    if (kind == "actor_critic_sparse") return AgentKind::actor_critic_sparse;
    if (kind == "actor_critic_dense") return AgentKind::actor_critic_dense;
    if (kind == "model_based") return AgentKind::model_based;
    if (kind == "random") return AgentKind::random;
    if (kind == "perfect_info") return AgentKind::perfect_info;
    throw ConfigError(key, "config key '" + key + "' names an unknown agent kind '" + kind + "'");
}

template <typename F>
void checked(const std::string& key, F&& validate) {
    try {
        validate();
    } catch (const ValidationError& e) {
        throw ConfigError(key, "invalid '" + key + "': " + e.what());
    }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t global, std::string_view stage) noexcept {
    return keyed_bits(global, purpose_tag(stage), 0, 0);
}

RunConfig RunConfig::parse(const std::string& text) {
    json root;
    try {
        root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw ConfigError("<file>", std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c;
    c.text_hash = io::hex64(io::fnv1a(text));
    c.seed = get<std::uint64_t>(root, "", "seed");

    const json& d = require(root, "", "datagen");
    c.datagen.n_customers = get<std::int64_t>(d, "datagen", "n_customers");
    c.datagen.n_train = get<std::int64_t>(d, "datagen", "n_train");
    c.datagen.n_test = get<std::int64_t>(d, "datagen", "n_test");
    c.datagen.n_resamples = get<std::int64_t>(d, "datagen", "n_resamples");
    c.datagen.base_premium = get<double>(d, "datagen", "base_premium");
    {
        const json& w = require(d, "datagen", "feature_weights");
        if (!w.is_array() || w.size() != kFeatureCount) {
            throw ConfigError("datagen.feature_weights", "datagen.feature_weights must hold 16 numbers");
        }
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            if (!w[i].is_number()) throw ConfigError("datagen.feature_weights", "datagen.feature_weights must hold 16 numbers");
            c.datagen.feature_weights[i] = w[i].get<double>();
        }
    }
    c.datagen.seed = c.seed;
    checked("datagen", [&] { c.datagen.validate(); });

    const json& g = require(root, "", "grid");
    checked("grid", [&] {
        c.grid = ActionGrid(get<double>(g, "grid", "lo"), get<double>(g, "grid", "hi"), get<double>(g, "grid", "step"));
    });

    const json& t = require(root, "", "train");
    c.train.iterations = get<std::uint64_t>(t, "train", "iterations");
    c.train.actor_lr = get<double>(t, "train", "actor_lr");
    c.train.critic_lr = get<double>(t, "train", "critic_lr");
    const auto schedule = get<std::string>(t, "train", "schedule");
    if (schedule == "constant") {
        c.train.schedule = LrSchedule::constant;
    } else if (schedule == "inv_sqrt") {
        c.train.schedule = LrSchedule::inv_sqrt;
    } else {
        throw ConfigError("train.schedule", "train.schedule must be 'constant' or 'inv_sqrt'");
    }
    c.train.checkpoint_every = get<std::uint64_t>(t, "train", "checkpoint_every");
    c.train.log_every = get<std::uint64_t>(t, "train", "log_every");
    c.train.mean_q_baseline = get<bool>(t, "train", "mean_q_baseline");
    c.trace_steps = get<bool>(t, "train", "trace_steps");
    {
        const json& h = require(t, "train", "hidden");
        if (!h.is_array()) throw ConfigError("train.hidden", "train.hidden must be a list of widths");
        c.hidden.clear();
        for (const auto& v : h) {
            if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) {
                throw ConfigError("train.hidden", "train.hidden widths must be positive integers");
            }
            c.hidden.push_back(v.get<std::size_t>());
        }
    }
    checked("train", [&] { c.train.validate(); });

    const json& e = require(root, "", "evaluate");
    checked("evaluate.quote_mode", [&] {
        c.evaluation.quote_mode = parse_quote_mode(get<std::string>(e, "evaluate", "quote_mode"));
    });
    c.evaluation.shuffle = get<bool>(e, "evaluate", "shuffle");

    const json& roster = require(root, "", "agents");
    if (!roster.is_array() || roster.empty()) throw ConfigError("agents", "agents must be a nonempty list");
    for (std::size_t i = 0; i < roster.size(); ++i) {
        const std::string path = "agents[" + std::to_string(i) + "]";
        AgentEntry entry;
        entry.name = get<std::string>(roster[i], path, "name");
        entry.kind = parse_kind(get<std::string>(roster[i], path, "kind"), path + ".kind");
        if (entry.kind == AgentKind::model_based) {
            entry.scenario.mean_scale = get<double>(roster[i], path, "mean_scale");
            entry.scenario.noise_sd = get<double>(roster[i], path, "noise_sd");
            checked(path, [&] { entry.scenario.validate(); });
        }
        for (const auto& other : c.roster) {
            if (other.name == entry.name) throw ConfigError(path + ".name", "duplicate agent name '" + entry.name + "'");
        }
        c.roster.push_back(entry);
    }
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("--config", "config file not found: " + path.string());
    return parse(io::read_file(path));
}

AgentRoster build_roster(const std::vector<AgentEntry>& entries, const PolicyParameters& sparse_policy,
                         const PolicyParameters& dense_policy, const FittedConversionModel& model,
                         const ActionGrid& grid, QuoteMode mode) {
    AgentRoster roster;
    for (const auto& e : entries) {
        switch (e.kind) {
            case AgentKind::actor_critic_sparse:
                roster.agents.push_back(std::make_unique<ActorCriticPolicy>(e.name, sparse_policy, mode));
                break;
            case AgentKind::actor_critic_dense:
                roster.agents.push_back(std::make_unique<ActorCriticPolicy>(e.name, dense_policy, mode));
                break;
            case AgentKind::model_based:
                roster.agents.push_back(std::make_unique<ModelBasedPolicy>(e.name, e.scenario, model, grid));
                break;
            case AgentKind::random:
                roster.agents.push_back(std::make_unique<RandomPolicy>(grid, e.name));
                break;
            case AgentKind::perfect_info:
                roster.agents.push_back(std::make_unique<PerfectInfoPolicy>(grid, e.name));
                break;
        }
    }
    return roster;
}

}  // namespace pcwlab
