#include "pcwlab/cli.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcwlab/agents.hpp"
#include "pcwlab/config.hpp"
#include "pcwlab/conversion.hpp"
#include "pcwlab/datagen.hpp"
#include "pcwlab/error.hpp"
#include "pcwlab/evaluator.hpp"
#include "pcwlab/io.hpp"
#include "pcwlab/kernels.hpp"
#include "pcwlab/pipeline.hpp"
#include "pcwlab/report.hpp"
#include "pcwlab/trainer.hpp"

namespace pcwlab::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kArtifactVersion = 1;
constexpr const char* kToolVersion = "pcwlab 1.0.0";

/// Collects every output of a subcommand and writes them only once all were produced,
/// each file via temp-and-rename, with the manifest last.
class OutputSet {
public:
    OutputSet(std::string command, fs::path dir) : command_(std::move(command)), dir_(std::move(dir)) {}

    void add(const std::string& name, std::string contents) { files_.emplace_back(name, std::move(contents)); }
    void input(const std::string& role, const fs::path& path) { inputs_[role] = path; }
    void seed(std::uint64_t s) { seed_ = s; }
    void config_hash(std::string h) { config_hash_ = std::move(h); }

    void commit(const std::string& manifest_name, std::ostream& out) {
        nlohmann::ordered_json m;
        m["tool"] = kToolVersion;
        m["artifact_version"] = kArtifactVersion;
        m["command"] = command_;
        if (seed_) m["seed"] = *seed_;
        if (!config_hash_.empty()) m["config_hash"] = config_hash_;
        m["kernels"] = std::string(kernels::backend_name(kernels::active_backend()));
        nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
        for (const auto& [role, path] : inputs_) {
            inputs[role] = {{"path", path.filename().string()}, {"fnv1a64", io::file_hash(path)}};
        }
        m["inputs"] = inputs;
        nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
        for (const auto& [name, contents] : files_) outputs[name] = io::hex64(io::fnv1a(contents));
        m["outputs"] = outputs;
        const std::string manifest = m.dump(2) + "\n";

        fs::create_directories(dir_);
        for (const auto& [name, contents] : files_) io::write_file_atomic(dir_ / name, contents);
        io::write_file_atomic(dir_ / manifest_name, manifest);
        out << manifest;
    }

private:
    std::string command_;
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
    std::map<std::string, fs::path> inputs_;
    std::optional<std::uint64_t> seed_;
    std::string config_hash_;
};

void require_file(const fs::path& path, const std::string& flag) {
    if (!fs::is_regular_file(path)) throw ConfigError(flag, flag + ": file not found: " + path.string());
}

Dataset load_dataset(const fs::path& path, const std::string& flag, SplitTag tag) {
    require_file(path, flag);
    return dataset_from_csv(io::read_file(path), tag);
}

FittedConversionModel load_model(const fs::path& path, const std::string& flag) {
    require_file(path, flag);
    return FittedConversionModel::from_json(io::read_file(path));
}

PolicyParameters load_policy(const fs::path& path) {
    require_file(path, "--policies");
    return PolicyParameters::from_json(io::read_file(path));
}

std::string bins_csv(const ConversionFit& fit) {
    std::string out = "z,count,empirical,fitted,true\n";
    for (std::size_t i = 0; i < fit.counts.size(); ++i) {
        const double z = fit.model.bin_center(i);
        io::append_g17(out, z);
        out += ',' + std::to_string(fit.counts[i]) + ',';
        if (fit.counts[i] > 0) io::append_g17(out, fit.empirical[i]);
        out += ',';
        io::append_g17(out, fit.model.values()[i]);
        out += ',';
        io::append_g17(out, true_conversion(z));
        out += '\n';
    }
    return out;
}

void emit_generated(OutputSet& outputs, const GeneratedData& data) {
    outputs.add("train.csv", dataset_to_csv(data.train));
    outputs.add("test.csv", dataset_to_csv(data.test));
    outputs.add("pool.jsonl", pool_to_jsonl(data.pool));
}

void emit_fit(OutputSet& outputs, const ConversionFit& fit) {
    outputs.add("conversion.json", fit.model.to_json() + "\n");
    outputs.add("conversion_bins.csv", bins_csv(fit));
}

void emit_trained(OutputSet& outputs, RewardMode mode, const TrainedPolicy& trained, bool trace_steps) {
    const std::string tag(reward_mode_name(mode));
    outputs.add("policy_" + tag + ".json", trained.result.params.to_json() + "\n");
    outputs.add("train_log_" + tag + ".csv", train_log_csv(trained.result.log));
    for (const auto& [it, json] : trained.checkpoints) {
        outputs.add("checkpoints/policy_" + tag + "_" + std::to_string(it) + ".json", json + "\n");
    }
    if (trace_steps) outputs.add("steps_" + tag + ".jsonl", trained.steps);
}

void emit_evaluation(OutputSet& outputs, const EvaluationTrace& trace) {
    const CumulativeCurves curves = cumulative_curves(trace);
    outputs.add("trace.csv", trace_csv(trace));
    outputs.add("curves.csv", curves_csv(curves));
    outputs.add("ranking.txt", ranking_table(summarize(trace)));
    outputs.add("fig2.svg", render_curves_svg(curves));
}

RunConfig default_eval_config() {
    RunConfig c;
    c.roster = default_roster();
    return c;
}

// ---- subcommands ----

struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string mode;
    std::string data;
    std::string model;
    std::string pool;
    std::string policies;
    std::string curves;
};

std::uint64_t effective_seed(const Flags& f, const RunConfig& c) { return f.seed ? *f.seed : c.seed; }

RunConfig load_config(const Flags& f) {
    RunConfig c = RunConfig::load(f.config);
    if (f.seed) {
        c.seed = *f.seed;
        c.datagen.seed = *f.seed;
    }
    return c;
}

void cmd_gen_data(const Flags& f, std::ostream& out) {
    const RunConfig config = load_config(f);
    OutputSet outputs("gen-data", f.out);
    outputs.input("config", f.config);
    outputs.seed(config.seed);
    outputs.config_hash(config.text_hash);
    emit_generated(outputs, generate_data(config));
    outputs.commit("manifest_gen-data.json", out);
}

void cmd_fit(const Flags& f, std::ostream& out) {
    const Dataset train = load_dataset(f.data, "--data", SplitTag::train);
    require_file(f.pool, "--pool");
    const auto pool = pool_from_jsonl(io::read_file(f.pool), train);
    if (pool.empty()) throw ArtifactError("pool file has no rows");
    OutputSet outputs("fit-conversion", f.out);
    outputs.input("pool", f.pool);
    outputs.input("data", f.data);
    emit_fit(outputs, fit_conversion(train, pool));
    outputs.commit("manifest_fit-conversion.json", out);
}

void cmd_train(const Flags& f, std::ostream& out) {
    const RunConfig config = load_config(f);
    const RewardMode mode = parse_reward_mode(f.mode);
    const Dataset train = load_dataset(f.data, "--data", SplitTag::train);
    const FittedConversionModel model = load_model(f.model, "--model");
    const std::uint64_t seed = effective_seed(f, config);
    OutputSet outputs("train", f.out);
    outputs.input("config", f.config);
    outputs.input("data", f.data);
    outputs.input("model", f.model);
    outputs.seed(seed);
    outputs.config_hash(config.text_hash);
    try {
        emit_trained(outputs, mode, train_policy(config, mode, seed, train, model), config.trace_steps);
    } catch (const TrainingDiverged& e) {
        io::write_file_atomic(fs::path(f.out) / ("policy_" + std::string(reward_mode_name(mode)) + "_diverged.json"),
                              e.snapshot().to_json() + "\n");
        throw;
    }
    outputs.add("conversion.json", model.to_json() + "\n");
    outputs.commit("manifest_train_" + std::string(reward_mode_name(mode)) + ".json", out);
}

void cmd_evaluate(const Flags& f, std::ostream& out) {
    const RunConfig config = f.config.empty() ? default_eval_config() : load_config(f);
    const fs::path dir(f.policies);
    if (!fs::is_directory(dir)) throw ConfigError("--policies", "--policies: not a directory: " + f.policies);
    const PolicyParameters sparse_policy = load_policy(dir / "policy_sparse.json");
    const PolicyParameters dense_policy = load_policy(dir / "policy_dense.json");
    const fs::path model_path = f.model.empty() ? dir / "conversion.json" : fs::path(f.model);
    const FittedConversionModel model = load_model(model_path, "--model");
    const Dataset test = load_dataset(f.data, "--data", SplitTag::test);
    const std::uint64_t seed = f.seed ? *f.seed : config.seed;

    OutputSet outputs("evaluate", f.out);
    outputs.input("policy_sparse", dir / "policy_sparse.json");
    outputs.input("policy_dense", dir / "policy_dense.json");
    outputs.input("model", model_path);
    outputs.input("data", f.data);
    if (!f.config.empty()) {
        outputs.input("config", f.config);
        outputs.config_hash(config.text_hash);
    }
    outputs.seed(seed);
    emit_evaluation(outputs, evaluate_policies(config, sparse_policy, dense_policy, model, test, seed));
    outputs.commit("manifest_evaluate.json", out);
}

void cmd_report(const Flags& f, std::ostream& out) {
    require_file(f.curves, "--curves");
    const CumulativeCurves curves = curves_from_csv(io::read_file(f.curves));
    OutputSet outputs("report", f.out);
    outputs.input("curves", f.curves);
    outputs.add("fig2.svg", render_curves_svg(curves));
    outputs.add("ranking.txt", ranking_table(summarize_curves(curves)));
    outputs.commit("manifest_report.json", out);
}

void cmd_run_all(const Flags& f, std::ostream& out) {
    const RunConfig config = load_config(f);
    const std::uint64_t seed = config.seed;
    const fs::path root(f.out);

    GeneratedData data = generate_data(config);
    const ConversionFit fit = fit_conversion(data.train, data.pool);
    TrainedPolicy sparse = train_policy(config, RewardMode::sparse, seed, data.train, fit.model);
    TrainedPolicy dense = train_policy(config, RewardMode::dense, seed, data.train, fit.model);
    const EvaluationTrace trace =
        evaluate_policies(config, sparse.result.params, dense.result.params, fit.model, data.test, seed);

    std::ostringstream sink;
    OutputSet gen("gen-data", root / "data");
    gen.input("config", f.config);
    gen.seed(seed);
    gen.config_hash(config.text_hash);
    emit_generated(gen, data);
    gen.commit("manifest_gen-data.json", sink);

    OutputSet fitted("fit-conversion", root / "model");
    fitted.input("pool", root / "data" / "pool.jsonl");
    fitted.input("data", root / "data" / "train.csv");
    emit_fit(fitted, fit);
    fitted.commit("manifest_fit-conversion.json", sink);

    for (auto* trained : {&sparse, &dense}) {
        const RewardMode mode = trained == &sparse ? RewardMode::sparse : RewardMode::dense;
        OutputSet policies("train", root / "policies");
        policies.input("config", f.config);
        policies.input("data", root / "data" / "train.csv");
        policies.input("model", root / "model" / "conversion.json");
        policies.seed(seed);
        policies.config_hash(config.text_hash);
        emit_trained(policies, mode, *trained, config.trace_steps);
        policies.add("conversion.json", fit.model.to_json() + "\n");
        policies.commit("manifest_train_" + std::string(reward_mode_name(mode)) + ".json", sink);
    }

    OutputSet eval("evaluate", root / "eval");
    eval.input("policy_sparse", root / "policies" / "policy_sparse.json");
    eval.input("policy_dense", root / "policies" / "policy_dense.json");
    eval.input("model", root / "policies" / "conversion.json");
    eval.input("data", root / "data" / "test.csv");
    eval.input("config", f.config);
    eval.seed(seed);
    eval.config_hash(config.text_hash);
    emit_evaluation(eval, trace);
    eval.commit("manifest_evaluate.json", sink);

    out << ranking_table(summarize(trace));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pricing-agent laboratory for price-comparison-site insurance quotes", "pcwlab"};
    app.require_subcommand(1);
    Flags f;
    std::uint64_t seed_value = 0;

    auto add_seed = [&](CLI::App* sub) { return sub->add_option("--seed", seed_value, "Global seed"); };

    auto* gen = app.add_subcommand("gen-data", "Synthesize customers, split them and resample the training pool");
    gen->add_option("--config", f.config)->required();
    gen->add_option("--out", f.out)->required();
    auto* gen_seed = add_seed(gen);

    auto* fit = app.add_subcommand("fit-conversion", "Fit the binned conversion estimator from a pool");
    fit->add_option("--pool", f.pool)->required();
    fit->add_option("--data", f.data, "Training dataset CSV the pool refers to")->required();
    fit->add_option("--out", f.out)->required();

    auto* train = app.add_subcommand("train", "Train an actor-critic pricing agent");
    train->add_option("--config", f.config)->required();
    train->add_option("--mode", f.mode, "dense | sparse")->required();
    train->add_option("--data", f.data, "Training dataset CSV")->required();
    train->add_option("--model", f.model, "Fitted conversion model JSON")->required();
    train->add_option("--out", f.out)->required();
    auto* train_seed = add_seed(train);

    auto* evaluate = app.add_subcommand("evaluate", "Evaluate all agents with shared acceptance variates");
    evaluate->add_option("--policies", f.policies, "Directory with policy_{sparse,dense}.json")->required();
    evaluate->add_option("--data", f.data, "Test dataset CSV")->required();
    evaluate->add_option("--out", f.out)->required();
    evaluate->add_option("--config", f.config, "Optional config for roster and quote mode");
    evaluate->add_option("--model", f.model, "Conversion model (default: <policies>/conversion.json)");
    auto* eval_seed = add_seed(evaluate);

    auto* report = app.add_subcommand("report", "Render cumulative-reward curves and the ranking table");
    report->add_option("--curves", f.curves)->required();
    report->add_option("--out", f.out)->required();

    auto* all = app.add_subcommand("run-all", "Run the whole pipeline");
    all->add_option("--config", f.config)->required();
    all->add_option("--out", f.out)->required();
    auto* all_seed = add_seed(all);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    for (auto* opt : {gen_seed, train_seed, eval_seed, all_seed}) {
        if (opt->count() > 0) f.seed = seed_value;
    }

    try {
        if (gen->parsed()) cmd_gen_data(f, out);
        else if (fit->parsed()) cmd_fit(f, out);
        else if (train->parsed()) cmd_train(f, out);
        else if (evaluate->parsed()) cmd_evaluate(f, out);
        else if (report->parsed()) cmd_report(f, out);
        else if (all->parsed()) cmd_run_all(f, out);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error [" << e.key() << "]: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ArtifactError& e) {
        err << "artifact error: " << e.what() << "\n";
        return kExitArtifact;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace pcwlab::cli
