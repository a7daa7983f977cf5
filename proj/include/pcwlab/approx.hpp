#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcwlab/domain.hpp"

namespace pcwlab {

// Agent inputs: the 16 customer features, the benchmark premium and the burn cost.
// Market quantiles are never part of the input.
inline constexpr std::size_t kPolicyInputDim = kFeatureCount + 2;

enum class Activation { tanh };

/// Fully connected network shape. Parameters are one flat vector; each layer stores its
/// weight matrix (out x in, row-major) followed by its bias.
struct MlpSpec {
    std::size_t input_dim = kPolicyInputDim;
    std::vector<std::size_t> hidden = {64, 64};
    std::size_t output_dim = 601;
    Activation activation = Activation::tanh;

    std::size_t layer_count() const noexcept { return hidden.size() + 1; }
    std::size_t layer_in(std::size_t layer) const noexcept;
    std::size_t layer_out(std::size_t layer) const noexcept;
    // Offset of the layer's weight matrix; its bias follows at + in * out.
    std::size_t layer_offset(std::size_t layer) const noexcept;
    std::size_t param_count() const noexcept;
    void validate() const;

    friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

/// Activation buffers for one forward pass. Reusable; never shared between threads.
struct MlpWorkspace {
    std::vector<std::vector<double>> activations;  // [0] = input, [l] = hidden layer l
    std::vector<std::vector<double>> deltas;
    std::vector<double> output;

    void prepare(const MlpSpec& spec);
};

namespace mlp {

// Fills ws.activations up to the last hidden layer.
void forward_hidden(const MlpSpec& spec, std::span<const double> w, std::span<const double> x,
                    MlpWorkspace& ws);
// Requires forward_hidden; writes every output into ws.output.
void forward_output(const MlpSpec& spec, std::span<const double> w, MlpWorkspace& ws);
// Requires forward_hidden; evaluates a single output unit.
double forward_output_one(const MlpSpec& spec, std::span<const double> w, const MlpWorkspace& ws,
                          std::size_t unit);

// target += scale * grad, where grad is the gradient of sum_k d_out[k] * y_k with respect
// to the parameters, evaluated at w. Each entry is formed as target + scale * g with g the
// exact gradient entry. target may alias w.
void backprop(const MlpSpec& spec, std::span<const double> w, MlpWorkspace& ws,
              std::span<const double> d_out, double scale, std::span<double> target);
// Same for d_out = d * e_unit, touching only the unit's row of the output layer.
void backprop_one(const MlpSpec& spec, std::span<const double> w, MlpWorkspace& ws,
                  std::size_t unit, double d, double scale, std::span<double> target);

// Glorot-uniform weights and zero biases from the keyed stream (seed, purpose).
std::vector<double> glorot_init(const MlpSpec& spec, std::uint64_t seed, std::string_view purpose);

}  // namespace mlp

/// Per-input standardization: (x - mean) / scale.
struct Normalizer {
    std::vector<double> mean = std::vector<double>(kPolicyInputDim, 0.0);
    std::vector<double> scale = std::vector<double>(kPolicyInputDim, 1.0);

    // Sample mean and standard deviation over the dataset (scale 1 for constant columns).
    static Normalizer fit(const Dataset& data);
    void apply(const CustomerRecord& record, std::span<double> out) const;
    std::vector<double> apply(const CustomerRecord& record) const;
    void validate() const;

    friend bool operator==(const Normalizer&, const Normalizer&) = default;
};

/// Actor and critic weights. The actor emits one logit per grid action; the critic emits
/// one action value per grid action.
struct PolicyParameters {
    static constexpr int kVersion = 1;

    ActionGrid grid;
    MlpSpec actor_spec;
    std::vector<double> actor;
    MlpSpec critic_spec;
    std::vector<double> critic;
    Normalizer normalizer;

    // Glorot initialization of both networks for the given grid.
    static PolicyParameters initialize(const ActionGrid& grid, Normalizer normalizer,
                                       std::vector<std::size_t> hidden, std::uint64_t seed);
    // All weights zero: uniform policy and zero critic.
    static PolicyParameters zeros(const ActionGrid& grid, Normalizer normalizer,
                                  std::vector<std::size_t> hidden);

    // Throws ValidationError on shape mismatches and NumericError on non-finite weights.
    void validate() const;

    std::string to_json() const;
    // Throws ArtifactError on malformed input or version mismatch.
    static PolicyParameters from_json(const std::string& text);

    friend bool operator==(const PolicyParameters&, const PolicyParameters&) = default;
};

// Stable softmax in place; returns log of the normalizer (log-sum-exp).
double softmax_inplace(std::span<double> logits) noexcept;

std::vector<double> actor_logits(const PolicyParameters& params, std::span<const double> input);
std::vector<double> action_probabilities(const PolicyParameters& params, std::span<const double> input);
double log_policy(const PolicyParameters& params, std::span<const double> input, std::size_t action);
double critic_value(const PolicyParameters& params, std::span<const double> input, std::size_t action);
// Gradient of log pi(action | input) over the actor weights.
std::vector<double> grad_log_policy(const PolicyParameters& params, std::span<const double> input,
                                    std::size_t action);
// Gradient of Q(input, action) over the critic weights.
std::vector<double> grad_critic(const PolicyParameters& params, std::span<const double> input,
                                std::size_t action);

}  // namespace pcwlab
