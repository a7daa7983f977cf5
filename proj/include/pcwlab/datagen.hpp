#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pcwlab/conversion.hpp"
#include "pcwlab/domain.hpp"
#include "pcwlab/rng.hpp"

namespace pcwlab {

struct GenConfig {
    std::int64_t n_customers = 35000;
    std::int64_t n_train = 28000;
    std::int64_t n_test = 7000;
    std::int64_t n_resamples = 5'000'000;
    std::uint64_t seed = 20230601;
    // Weights of the log-linear market index over standardized features.
    std::array<double, kFeatureCount> feature_weights = {
        -0.12, 0.15, -0.10, 0.08, 0.05, -0.04, 0.06, 0.03,
        -0.02, 0.04, 0.07, 0.05, -0.03, 0.06, 0.04, 0.05};
    double base_premium = 500.0;

    void validate() const;
};

/// One row of the resampled historical pool. The customer is referenced by its
/// position in the training dataset rather than copied.
struct ResampledQuote {
    std::int64_t customer_id = 0;
    std::uint32_t record_index = 0;
    double premium = 0.0;
    // Acceptance variate in (0, 1); accepted == (u <= p(z)).
    double u = 0.0;
    bool accepted = false;
};

struct Augmentation {
    double burn_cost = 0.0;
    double benchmark_premium = 0.0;
    double avg_top6_10 = 0.0;
};

// Population mean and standard deviation of each raw feature, used to standardize
// features before the market index is formed.
struct FeatureMoments {
    std::array<double, kFeatureCount> mean{};
    std::array<double, kFeatureCount> sd{};
};
const FeatureMoments& feature_population_moments();

std::array<double, kFeatureCount> draw_features(KeyedStream& stream);

// Applies the scaling factors to avg_top5: burn factor floored at 0.05, benchmark factor
// floored at 0.05 and the |top6-10 ratio| floored at 1.05.
Augmentation augment_from_draws(double avg_top5, double burn_draw, double benchmark_draw,
                                double ratio_draw);
// Draws burn ~ N(0.8, 0.2), benchmark ~ N(1, 0.1), ratio ~ N(1, 0.3) in that order.
Augmentation augment_record(double avg_top5, KeyedStream& stream);

// All n_customers records with ids 0..n-1.
Dataset generate_customers(const GenConfig& config);

// Keyed random split into (train, test); each side keeps id order.
std::pair<Dataset, Dataset> split_dataset(const Dataset& all, const GenConfig& config);

std::vector<ResampledQuote> build_training_pool(const Dataset& train, const ConversionCurve& model,
                                                const GenConfig& config);

// Normalized price of every pool row, computed from the referenced training record.
std::vector<double> pool_normalized_prices(const Dataset& train,
                                           const std::vector<ResampledQuote>& pool);

ConversionFit fit_conversion(const Dataset& train, const std::vector<ResampledQuote>& pool);

// JSON lines: {"customer_id":..,"premium":..,"accepted":..}
std::string pool_to_jsonl(const std::vector<ResampledQuote>& pool);
// Resolves customer ids against train; throws ArtifactError on unknown ids or bad rows.
// The acceptance variate is not stored and comes back as NaN.
std::vector<ResampledQuote> pool_from_jsonl(const std::string& text, const Dataset& train);

}  // namespace pcwlab
