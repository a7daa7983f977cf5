#include "pcwlab/simenv.hpp"

#include <ostream>

#include "pcwlab/error.hpp"
#include "pcwlab/io.hpp"

namespace pcwlab {

std::string_view reward_mode_name(RewardMode mode) noexcept {
    return mode == RewardMode::dense ? "dense" : "sparse";
}

RewardMode parse_reward_mode(std::string_view name) {
    if (name == "dense") return RewardMode::dense;
    if (name == "sparse") return RewardMode::sparse;
    throw ValidationError("reward mode must be 'sparse' or 'dense', got '" + std::string(name) + "'");
}

std::string env_step_to_json(const EnvStep& s) {
    std::string out = "{\"customer_id\":" + std::to_string(s.record.id) +
                      ",\"action_index\":" + std::to_string(s.action_index) + ",\"premium\":";
    io::append_roundtrip(out, s.premium);
    out += ",\"z\":";
    io::append_roundtrip(out, s.z.z);
    out += ",\"p_hat\":";
    io::append_roundtrip(out, s.p_hat);
    out += ",\"u\":";
    io::append_roundtrip(out, s.u);
    out += s.accepted ? ",\"accepted\":true" : ",\"accepted\":false";
    out += ",\"sparse_reward\":";
    io::append_roundtrip(out, s.sparse_reward);
    out += ",\"dense_reward\":";
    io::append_roundtrip(out, s.dense_reward);
    out += "}";
    return out;
}

const CustomerRecord& sample_customer(const Dataset& data, KeyedStream& stream) {
    if (data.empty()) throw ValidationError("sample_customer: empty dataset");
    return data.records[stream.below(data.size())];
}

EnvStep step(const CustomerRecord& record, std::size_t action_index, const ActionGrid& grid,
             const FittedConversionModel& model, KeyedStream& stream) {
    EnvStep s;
    s.record = record;
    s.action_index = action_index;
    s.premium = premium_for(record, grid.value(action_index));
    s.z = normalized_price(s.premium, record.avg_top5, record.avg_top6_10);
    s.p_hat = model(s.z);
    s.u = (static_cast<double>(stream.next_bits() >> 11) + 0.5) * 0x1.0p-53;
    s.accepted = s.u <= s.p_hat;
    const double margin = s.premium - record.burn_cost;
    s.sparse_reward = s.accepted ? margin : 0.0;
    s.dense_reward = s.p_hat * margin;
    return s;
}

SimEnv::SimEnv(const Dataset& train, FittedConversionModel model, ActionGrid grid, RewardMode mode,
               std::uint64_t seed)
    : train_(&train), model_(std::move(model)), grid_(grid), mode_(mode), seed_(seed) {
    if (train.empty()) throw ValidationError("simulator needs a nonempty training set");
}

const CustomerRecord& SimEnv::customer(std::uint64_t iteration) const {
    KeyedStream stream(seed_, "train.customer", iteration);
    return sample_customer(*train_, stream);
}

EnvStep SimEnv::step(const CustomerRecord& record, std::size_t action_index,
                     std::uint64_t iteration) const {
    KeyedStream stream(seed_, "train", iteration);
    EnvStep s = pcwlab::step(record, action_index, grid_, model_, stream);
    if (trace_ != nullptr) *trace_ << env_step_to_json(s) << '\n';
    return s;
}

}  // namespace pcwlab
