#include "pcwlab/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string_view>
#include <unordered_map>

#include "json.hpp"
#include "pcwlab/error.hpp"
#include "pcwlab/io.hpp"

namespace pcwlab {

namespace {

constexpr double kTop5Floor = 100.0;
constexpr double kTop5Cap = 5000.0;
constexpr double kTop5NoiseSd = 0.1;
constexpr double kBurnFloor = 0.05;
constexpr double kBenchmarkFloor = 0.05;
constexpr double kRatioFloor = 1.05;
constexpr double kPremiumFloor = 0.1;
constexpr double kMileageFloor = 1000.0;

// Open-interval variate so that u <= 0 never accepts and u <= 1 always does.
double acceptance_variate(KeyedStream& s) {
    return (static_cast<double>(s.next_bits() >> 11) + 0.5) * 0x1.0p-53;
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

FeatureMoments compute_moments() {
    FeatureMoments m;
    // age ~ U[18, 80]
    m.mean[0] = 49.0;
    m.sd[0] = 62.0 / std::sqrt(12.0);
    // vehicle value ~ LogNormal(ln 8000, 0.5)
    const double s2 = 0.25;
    m.mean[1] = 8000.0 * std::exp(s2 / 2.0);
    m.sd[1] = m.mean[1] * std::sqrt(std::exp(s2) - 1.0);
    // no-claims years ~ U{0..9}
    m.mean[2] = 4.5;
    m.sd[2] = std::sqrt(99.0 / 12.0);
    // mileage ~ N(8000, 3000) truncated below at 1000
    const double alpha = (kMileageFloor - 8000.0) / 3000.0;
    const double lambda = normal_pdf(alpha) / (1.0 - normal_cdf(alpha));
    m.mean[3] = 8000.0 + 3000.0 * lambda;
    m.sd[3] = 3000.0 * std::sqrt(1.0 + alpha * lambda - lambda * lambda);
    for (std::size_t i = 4; i < 10; ++i) {
        m.mean[i] = 0.0;
        m.sd[i] = 1.0;
    }
    for (std::size_t i = 10; i < kFeatureCount; ++i) {
        m.mean[i] = 0.3;
        m.sd[i] = std::sqrt(0.3 * 0.7);
    }
    return m;
}

}  // namespace

void GenConfig::validate() const {
    if (n_customers <= 0 || n_train <= 0 || n_test <= 0 || n_resamples <= 0) {
        throw ValidationError("gen config: counts must be positive");
    }
    if (n_train + n_test != n_customers) {
        throw ValidationError("gen config: n_train + n_test must equal n_customers");
    }
    if (n_customers > std::numeric_limits<std::uint32_t>::max()) {
        throw ValidationError("gen config: too many customers");
    }
    if (!(base_premium > 0.0) || !std::isfinite(base_premium)) {
        throw ValidationError("gen config: base_premium must be positive");
    }
    for (double w : feature_weights) {
        if (!std::isfinite(w)) throw ValidationError("gen config: non-finite feature weight");
    }
}

const FeatureMoments& feature_population_moments() {
    static const FeatureMoments moments = compute_moments();
    return moments;
}

std::array<double, kFeatureCount> draw_features(KeyedStream& s) {
    std::array<double, kFeatureCount> f{};
    f[0] = 18.0 + 62.0 * s.uniform();
    f[1] = std::exp(s.normal(std::log(8000.0), 0.5));
    f[2] = static_cast<double>(s.below(10));
    double mileage = s.normal(8000.0, 3000.0);
    while (mileage < kMileageFloor) mileage = s.normal(8000.0, 3000.0);
    f[3] = mileage;
    for (std::size_t i = 4; i < 10; ++i) f[i] = s.normal(0.0, 1.0);
    for (std::size_t i = 10; i < kFeatureCount; ++i) f[i] = s.uniform() < 0.3 ? 1.0 : 0.0;
    return f;
}

Augmentation augment_from_draws(double avg_top5, double burn_draw, double benchmark_draw,
                                double ratio_draw) {
    return Augmentation{
        avg_top5 * std::max(burn_draw, kBurnFloor),
        avg_top5 * std::max(benchmark_draw, kBenchmarkFloor),
        avg_top5 * std::max(std::abs(ratio_draw), kRatioFloor),
    };
}

Augmentation augment_record(double avg_top5, KeyedStream& s) {
    const double burn = s.normal(0.8, 0.2);
    const double benchmark = s.normal(1.0, 0.1);
    const double ratio = s.normal(1.0, 0.3);
    return augment_from_draws(avg_top5, burn, benchmark, ratio);
}

Dataset generate_customers(const GenConfig& config) {
    config.validate();
    const auto& moments = feature_population_moments();
    Dataset all;
    all.records.resize(static_cast<std::size_t>(config.n_customers));
    for (std::int64_t id = 0; id < config.n_customers; ++id) {
        CustomerRecord& r = all.records[static_cast<std::size_t>(id)];
        r.id = id;
        KeyedStream features(config.seed, "customer.features", static_cast<std::uint64_t>(id));
        r.features = draw_features(features);

        double index = 0.0;
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            index += config.feature_weights[i] * (r.features[i] - moments.mean[i]) / moments.sd[i];
        }
        KeyedStream market(config.seed, "customer.market", static_cast<std::uint64_t>(id));
        const double noise = std::exp(market.normal(0.0, kTop5NoiseSd));
        r.avg_top5 = std::clamp(config.base_premium * std::exp(index) * noise, kTop5Floor, kTop5Cap);

        KeyedStream augment(config.seed, "customer.augment", static_cast<std::uint64_t>(id));
        const Augmentation a = augment_record(r.avg_top5, augment);
        r.burn_cost = a.burn_cost;
        r.benchmark_premium = a.benchmark_premium;
        r.avg_top6_10 = a.avg_top6_10;
    }
    return all;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& all, const GenConfig& config) {
    config.validate();
    if (static_cast<std::int64_t>(all.size()) != config.n_customers) {
        throw ValidationError("split: dataset size does not match n_customers");
    }
    std::vector<std::size_t> order(all.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    KeyedStream shuffle(config.seed, "split", 0);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[shuffle.below(i + 1)]);
    }
    std::vector<bool> in_train(all.size(), false);
    for (std::int64_t k = 0; k < config.n_train; ++k) in_train[order[static_cast<std::size_t>(k)]] = true;

    Dataset train;
    Dataset test;
    train.split_tag = SplitTag::train;
    test.split_tag = SplitTag::test;
    for (std::size_t i = 0; i < all.size(); ++i) {
        (in_train[i] ? train : test).records.push_back(all.records[i]);
    }
    return {std::move(train), std::move(test)};
}

std::vector<ResampledQuote> build_training_pool(const Dataset& train, const ConversionCurve& model,
                                                const GenConfig& config) {
    config.validate();
    if (train.empty()) throw ValidationError("training pool: empty training set");
    std::vector<ResampledQuote> pool(static_cast<std::size_t>(config.n_resamples));
    for (std::size_t row = 0; row < pool.size(); ++row) {
        KeyedStream s(config.seed, "pool", row);
        const auto idx = static_cast<std::uint32_t>(s.below(train.size()));
        const CustomerRecord& r = train.records[idx];
        const double factor = std::max(s.normal(1.0, 0.3), kPremiumFloor);
        ResampledQuote& q = pool[row];
        q.customer_id = r.id;
        q.record_index = idx;
        q.premium = r.avg_top5 * factor;
        q.u = acceptance_variate(s);
        q.accepted = q.u <= model(normalized_price(q.premium, r.avg_top5, r.avg_top6_10).z);
    }
    return pool;
}

std::vector<double> pool_normalized_prices(const Dataset& train,
                                           const std::vector<ResampledQuote>& pool) {
    std::vector<double> z(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const CustomerRecord& r = train.records.at(pool[i].record_index);
        z[i] = normalized_price(pool[i].premium, r.avg_top5, r.avg_top6_10).z;
    }
    return z;
}

ConversionFit fit_conversion(const Dataset& train, const std::vector<ResampledQuote>& pool) {
    const std::vector<double> z = pool_normalized_prices(train, pool);
    std::vector<std::uint8_t> accepted(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) accepted[i] = pool[i].accepted ? 1 : 0;
    return fit_conversion(std::span<const double>(z), std::span<const std::uint8_t>(accepted));
}

std::string pool_to_jsonl(const std::vector<ResampledQuote>& pool) {
    std::string out;
    out.reserve(pool.size() * 64);
    for (const auto& q : pool) {
        out += "{\"customer_id\":";
        out += std::to_string(q.customer_id);
        out += ",\"premium\":";
        io::append_roundtrip(out, q.premium);
        out += q.accepted ? ",\"accepted\":true}\n" : ",\"accepted\":false}\n";
    }
    return out;
}

std::vector<ResampledQuote> pool_from_jsonl(const std::string& text, const Dataset& train) {
    std::unordered_map<std::int64_t, std::uint32_t> index;
    index.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        index.emplace(train.records[i].id, static_cast<std::uint32_t>(i));
    }
    std::vector<ResampledQuote> pool;
    std::string_view rest(text);
    std::size_t line_no = 0;
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        const std::string_view line = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            ResampledQuote q;
            q.customer_id = j.at("customer_id").get<std::int64_t>();
            q.premium = j.at("premium").get<double>();
            q.accepted = j.at("accepted").get<bool>();
            q.u = std::numeric_limits<double>::quiet_NaN();
            const auto it = index.find(q.customer_id);
            if (it == index.end()) {
                throw ArtifactError("unknown customer id " + std::to_string(q.customer_id));
            }
            if (!(q.premium > 0.0)) throw ArtifactError("non-positive premium");
            q.record_index = it->second;
            pool.push_back(q);
        } catch (const nlohmann::json::exception& e) {
            throw ArtifactError("pool line " + std::to_string(line_no) + ": " + e.what());
        } catch (const ArtifactError& e) {
            throw ArtifactError("pool line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return pool;
}

}  // namespace pcwlab
