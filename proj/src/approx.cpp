#include "pcwlab/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "pcwlab/error.hpp"
#include "pcwlab/kernels.hpp"
#include "pcwlab/rng.hpp"

namespace pcwlab {

std::size_t MlpSpec::layer_in(std::size_t layer) const noexcept {
    return layer == 0 ? input_dim : hidden[layer - 1];
}

std::size_t MlpSpec::layer_out(std::size_t layer) const noexcept {
    return layer == hidden.size() ? output_dim : hidden[layer];
}

std::size_t MlpSpec::layer_offset(std::size_t layer) const noexcept {
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layer; ++l) offset += (layer_in(l) + 1) * layer_out(l);
    return offset;
}

std::size_t MlpSpec::param_count() const noexcept { return layer_offset(layer_count()); }

void MlpSpec::validate() const {
    if (input_dim == 0 || output_dim == 0 ||
        std::any_of(hidden.begin(), hidden.end(), [](std::size_t h) { return h == 0; })) {
        throw ValidationError("network dimensions must be positive");
    }
}

void MlpWorkspace::prepare(const MlpSpec& spec) {
    const std::size_t n = spec.hidden.size() + 1;
    if (activations.size() != n) {
        activations.assign(n, {});
        deltas.assign(n, {});
    }
    activations[0].resize(spec.input_dim);
    deltas[0].resize(spec.input_dim);
    for (std::size_t l = 0; l < spec.hidden.size(); ++l) {
        activations[l + 1].resize(spec.hidden[l]);
        deltas[l + 1].resize(spec.hidden[l]);
    }
    output.resize(spec.output_dim);
}

namespace mlp {

void forward_hidden(const MlpSpec& spec, std::span<const double> w, std::span<const double> x,
                    MlpWorkspace& ws) {
    ws.prepare(spec);
    std::copy(x.begin(), x.end(), ws.activations[0].begin());
    const auto& k = kernels::active();
    for (std::size_t l = 0; l < spec.hidden.size(); ++l) {
        const std::size_t in = spec.layer_in(l);
        const std::size_t out = spec.layer_out(l);
        const double* wl = w.data() + spec.layer_offset(l);
        std::vector<double>& h = ws.activations[l + 1];
        k.gemv(wl, out, in, ws.activations[l].data(), wl + out * in, h.data());
        for (double& v : h) v = std::tanh(v);
    }
}

void forward_output(const MlpSpec& spec, std::span<const double> w, MlpWorkspace& ws) {
    const std::size_t last = spec.hidden.size();
    const std::size_t in = spec.layer_in(last);
    const std::size_t out = spec.output_dim;
    const double* wl = w.data() + spec.layer_offset(last);
    kernels::active().gemv(wl, out, in, ws.activations[last].data(), wl + out * in, ws.output.data());
}

double forward_output_one(const MlpSpec& spec, std::span<const double> w, const MlpWorkspace& ws,
                          std::size_t unit) {
    const std::size_t last = spec.hidden.size();
    const std::size_t in = spec.layer_in(last);
    const double* wl = w.data() + spec.layer_offset(last);
    return kernels::active().dot(wl + unit * in, ws.activations[last].data(), in) +
           wl[spec.output_dim * in + unit];
}

namespace {

// Propagates deltas[last] (gradient at the last hidden activation) down to the first
// hidden layer, converting each into a pre-activation delta. Reads w only.
void propagate_hidden(const MlpSpec& spec, std::span<const double> w, MlpWorkspace& ws) {
    const auto& k = kernels::active();
    for (std::size_t l = spec.hidden.size(); l >= 1; --l) {
        std::vector<double>& delta = ws.deltas[l];
        const std::vector<double>& h = ws.activations[l];
        for (std::size_t i = 0; i < delta.size(); ++i) delta[i] *= 1.0 - h[i] * h[i];
        if (l > 1) {
            std::vector<double>& below = ws.deltas[l - 1];
            std::fill(below.begin(), below.end(), 0.0);
            const std::size_t layer = l - 1;
            k.gemv_t_acc(w.data() + spec.layer_offset(layer), spec.layer_out(layer),
                         spec.layer_in(layer), delta.data(), below.data());
        }
    }
}

void apply_hidden(const MlpSpec& spec, MlpWorkspace& ws, double scale, std::span<double> target) {
    const auto& k = kernels::active();
    for (std::size_t layer = 0; layer < spec.hidden.size(); ++layer) {
        const std::size_t in = spec.layer_in(layer);
        const std::size_t out = spec.layer_out(layer);
        double* wl = target.data() + spec.layer_offset(layer);
        const std::vector<double>& delta = ws.deltas[layer + 1];
        k.rank1_acc(wl, out, in, scale, delta.data(), ws.activations[layer].data());
        k.axpy(scale, delta.data(), wl + out * in, out);
    }
}

}  // namespace

void backprop(const MlpSpec& spec, std::span<const double> w, MlpWorkspace& ws,
              std::span<const double> d_out, double scale, std::span<double> target) {
    const auto& k = kernels::active();
    const std::size_t last = spec.hidden.size();
    const std::size_t in = spec.layer_in(last);
    const std::size_t out = spec.output_dim;
    if (last > 0) {
        std::vector<double>& dh = ws.deltas[last];
        std::fill(dh.begin(), dh.end(), 0.0);
        k.gemv_t_acc(w.data() + spec.layer_offset(last), out, in, d_out.data(), dh.data());
        propagate_hidden(spec, w, ws);
    }
    // Every delta is computed from w before target (possibly w itself) changes.
    double* wl = target.data() + spec.layer_offset(last);
    k.rank1_acc(wl, out, in, scale, d_out.data(), ws.activations[last].data());
    k.axpy(scale, d_out.data(), wl + out * in, out);
    apply_hidden(spec, ws, scale, target);
}

void backprop_one(const MlpSpec& spec, std::span<const double> w, MlpWorkspace& ws,
                  std::size_t unit, double d, double scale, std::span<double> target) {
    const auto& k = kernels::active();
    const std::size_t last = spec.hidden.size();
    const std::size_t in = spec.layer_in(last);
    const std::size_t out = spec.output_dim;
    const double* row = w.data() + spec.layer_offset(last) + unit * in;
    if (last > 0) {
        std::vector<double>& dh = ws.deltas[last];
        for (std::size_t j = 0; j < in; ++j) dh[j] = d * row[j];
        propagate_hidden(spec, w, ws);
    }
    double* wl = target.data() + spec.layer_offset(last);
    k.rank1_acc(wl + unit * in, 1, in, scale, &d, ws.activations[last].data());
    wl[out * in + unit] += scale * d;
    apply_hidden(spec, ws, scale, target);
}

std::vector<double> glorot_init(const MlpSpec& spec, std::uint64_t seed, std::string_view purpose) {
    spec.validate();
    std::vector<double> w(spec.param_count(), 0.0);
    KeyedStream stream(seed, purpose, 0);
    for (std::size_t layer = 0; layer < spec.layer_count(); ++layer) {
        const std::size_t in = spec.layer_in(layer);
        const std::size_t out = spec.layer_out(layer);
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        double* wl = w.data() + spec.layer_offset(layer);
        for (std::size_t i = 0; i < in * out; ++i) wl[i] = limit * (2.0 * stream.uniform() - 1.0);
    }
    return w;
}

}  // namespace mlp

Normalizer Normalizer::fit(const Dataset& data) {
    Normalizer n;
    if (data.empty()) return n;
    const double count = static_cast<double>(data.size());
    std::vector<double> sum(kPolicyInputDim, 0.0);
    for (const auto& r : data.records) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) sum[i] += r.features[i];
        sum[kFeatureCount] += r.benchmark_premium;
        sum[kFeatureCount + 1] += r.burn_cost;
    }
    for (std::size_t i = 0; i < kPolicyInputDim; ++i) n.mean[i] = sum[i] / count;
    std::vector<double> sq(kPolicyInputDim, 0.0);
    for (const auto& r : data.records) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            const double d = r.features[i] - n.mean[i];
            sq[i] += d * d;
        }
        const double dp = r.benchmark_premium - n.mean[kFeatureCount];
        sq[kFeatureCount] += dp * dp;
        const double db = r.burn_cost - n.mean[kFeatureCount + 1];
        sq[kFeatureCount + 1] += db * db;
    }
    for (std::size_t i = 0; i < kPolicyInputDim; ++i) {
        const double sd = std::sqrt(sq[i] / count);
        n.scale[i] = sd > 1e-12 ? sd : 1.0;
    }
    return n;
}

void Normalizer::apply(const CustomerRecord& record, std::span<double> out) const {
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        out[i] = (record.features[i] - mean[i]) / scale[i];
    }
    out[kFeatureCount] = (record.benchmark_premium - mean[kFeatureCount]) / scale[kFeatureCount];
    out[kFeatureCount + 1] = (record.burn_cost - mean[kFeatureCount + 1]) / scale[kFeatureCount + 1];
}

std::vector<double> Normalizer::apply(const CustomerRecord& record) const {
    std::vector<double> out(kPolicyInputDim);
    apply(record, out);
    return out;
}

void Normalizer::validate() const {
    if (mean.size() != kPolicyInputDim || scale.size() != kPolicyInputDim) {
        throw ValidationError("normalizer needs " + std::to_string(kPolicyInputDim) + " entries");
    }
    for (std::size_t i = 0; i < kPolicyInputDim; ++i) {
        if (!std::isfinite(mean[i]) || !(scale[i] > 0.0) || !std::isfinite(scale[i])) {
            throw ValidationError("normalizer scales must be finite and positive");
        }
    }
}

namespace {

MlpSpec head_spec(const ActionGrid& grid, std::vector<std::size_t> hidden) {
    MlpSpec spec;
    spec.input_dim = kPolicyInputDim;
    spec.hidden = std::move(hidden);
    spec.output_dim = grid.count();
    spec.validate();
    return spec;
}

}  // namespace

PolicyParameters PolicyParameters::initialize(const ActionGrid& grid, Normalizer normalizer,
                                              std::vector<std::size_t> hidden, std::uint64_t seed) {
    PolicyParameters p;
    p.grid = grid;
    p.actor_spec = head_spec(grid, hidden);
    p.critic_spec = head_spec(grid, std::move(hidden));
    p.actor = mlp::glorot_init(p.actor_spec, seed, "init.actor");
    p.critic = mlp::glorot_init(p.critic_spec, seed, "init.critic");
    p.normalizer = std::move(normalizer);
    p.validate();
    return p;
}

PolicyParameters PolicyParameters::zeros(const ActionGrid& grid, Normalizer normalizer,
                                         std::vector<std::size_t> hidden) {
    PolicyParameters p;
    p.grid = grid;
    p.actor_spec = head_spec(grid, hidden);
    p.critic_spec = head_spec(grid, std::move(hidden));
    p.actor.assign(p.actor_spec.param_count(), 0.0);
    p.critic.assign(p.critic_spec.param_count(), 0.0);
    p.normalizer = std::move(normalizer);
    p.validate();
    return p;
}

void PolicyParameters::validate() const {
    actor_spec.validate();
    critic_spec.validate();
    normalizer.validate();
    if (actor_spec.output_dim != grid.count() || critic_spec.output_dim != grid.count()) {
        throw ValidationError("network outputs must match the action grid");
    }
    if (actor_spec.input_dim != kPolicyInputDim || critic_spec.input_dim != kPolicyInputDim) {
        throw ValidationError("network inputs must have " + std::to_string(kPolicyInputDim) + " entries");
    }
    if (actor.size() != actor_spec.param_count() || critic.size() != critic_spec.param_count()) {
        throw ValidationError("weight vector length does not match network shape");
    }
    auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    if (!finite(actor) || !finite(critic)) throw NumericError("non-finite network weight");
}

namespace {

nlohmann::ordered_json spec_to_json(const MlpSpec& spec) {
    nlohmann::ordered_json j;
    j["input_dim"] = spec.input_dim;
    j["hidden"] = spec.hidden;
    j["output_dim"] = spec.output_dim;
    j["activation"] = "tanh";
    return j;
}

MlpSpec spec_from_json(const nlohmann::json& j) {
    MlpSpec spec;
    spec.input_dim = j.at("input_dim").get<std::size_t>();
    spec.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    spec.output_dim = j.at("output_dim").get<std::size_t>();
    if (j.at("activation").get<std::string>() != "tanh") {
        throw ArtifactError("policy: unsupported activation");
    }
    return spec;
}

}  // namespace

std::string PolicyParameters::to_json() const {
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["layout"] = "per layer: weights row-major (out x in), then bias (out)";
    j["grid"] = {{"lo", grid.lo()}, {"hi", grid.hi()}, {"step", grid.step()}};
    j["normalizer"] = {{"mean", normalizer.mean}, {"scale", normalizer.scale}};
    j["actor"] = {{"spec", spec_to_json(actor_spec)}, {"weights", actor}};
    j["critic"] = {{"spec", spec_to_json(critic_spec)}, {"weights", critic}};
    return j.dump();
}

PolicyParameters PolicyParameters::from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("version").get<int>() != kVersion) throw ArtifactError("policy: unsupported version");
        PolicyParameters p;
        const auto& g = j.at("grid");
        p.grid = ActionGrid(g.at("lo").get<double>(), g.at("hi").get<double>(), g.at("step").get<double>());
        p.normalizer.mean = j.at("normalizer").at("mean").get<std::vector<double>>();
        p.normalizer.scale = j.at("normalizer").at("scale").get<std::vector<double>>();
        p.actor_spec = spec_from_json(j.at("actor").at("spec"));
        p.actor = j.at("actor").at("weights").get<std::vector<double>>();
        p.critic_spec = spec_from_json(j.at("critic").at("spec"));
        p.critic = j.at("critic").at("weights").get<std::vector<double>>();
        p.validate();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ArtifactError(std::string("policy: ") + e.what());
    } catch (const ValidationError& e) {
        throw ArtifactError(std::string("policy: ") + e.what());
    } catch (const NumericError& e) {
        throw ArtifactError(std::string("policy: ") + e.what());
    }
}

double softmax_inplace(std::span<double> logits) noexcept {
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& v : logits) {
        v = std::exp(v - m);
        sum += v;
    }
    const double inv = 1.0 / sum;
    for (double& v : logits) v *= inv;
    return m + std::log(sum);
}

std::vector<double> actor_logits(const PolicyParameters& params, std::span<const double> input) {
    MlpWorkspace ws;
    mlp::forward_hidden(params.actor_spec, params.actor, input, ws);
    mlp::forward_output(params.actor_spec, params.actor, ws);
    for (double v : ws.output) {
        if (!std::isfinite(v)) throw NumericError("non-finite actor logit");
    }
    return ws.output;
}

std::vector<double> action_probabilities(const PolicyParameters& params, std::span<const double> input) {
    std::vector<double> p = actor_logits(params, input);
    softmax_inplace(p);
    return p;
}

double log_policy(const PolicyParameters& params, std::span<const double> input, std::size_t action) {
    std::vector<double> logits = actor_logits(params, input);
    const double chosen = logits.at(action);
    return chosen - softmax_inplace(logits);
}

double critic_value(const PolicyParameters& params, std::span<const double> input, std::size_t action) {
    if (!params.grid.contains(action)) throw BoundsError("critic_value: action index out of range");
    MlpWorkspace ws;
    mlp::forward_hidden(params.critic_spec, params.critic, input, ws);
    const double q = mlp::forward_output_one(params.critic_spec, params.critic, ws, action);
    if (!std::isfinite(q)) throw NumericError("non-finite critic value");
    return q;
}

std::vector<double> grad_log_policy(const PolicyParameters& params, std::span<const double> input,
                                    std::size_t action) {
    if (!params.grid.contains(action)) throw BoundsError("grad_log_policy: action index out of range");
    MlpWorkspace ws;
    mlp::forward_hidden(params.actor_spec, params.actor, input, ws);
    mlp::forward_output(params.actor_spec, params.actor, ws);
    std::vector<double> d_out = ws.output;
    softmax_inplace(d_out);
    for (double& v : d_out) v = -v;
    d_out[action] += 1.0;
    std::vector<double> grad(params.actor.size(), 0.0);
    mlp::backprop(params.actor_spec, params.actor, ws, d_out, 1.0, grad);
    return grad;
}

std::vector<double> grad_critic(const PolicyParameters& params, std::span<const double> input,
                                std::size_t action) {
    if (!params.grid.contains(action)) throw BoundsError("grad_critic: action index out of range");
    MlpWorkspace ws;
    mlp::forward_hidden(params.critic_spec, params.critic, input, ws);
    std::vector<double> grad(params.critic.size(), 0.0);
    mlp::backprop_one(params.critic_spec, params.critic, ws, action, 1.0, 1.0, grad);
    return grad;
}

}  // namespace pcwlab
