#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pcwlab/conversion.hpp"
#include "pcwlab/datagen.hpp"
#include "pcwlab/domain.hpp"

namespace fixtures {

inline pcwlab::CustomerRecord make_record(std::int64_t id, double top5, double top6_10, double benchmark,
                                          double burn) {
    pcwlab::CustomerRecord r;
    r.id = id;
    for (std::size_t i = 0; i < pcwlab::kFeatureCount; ++i) r.features[i] = 0.1 * static_cast<double>(i) + id;
    r.avg_top5 = top5;
    r.avg_top6_10 = top6_10;
    r.benchmark_premium = benchmark;
    r.burn_cost = burn;
    return r;
}

// Records with markets spread around the benchmark, drawn from an independent generator.
inline pcwlab::Dataset random_dataset(std::size_t n, std::uint64_t seed, pcwlab::SplitTag tag) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> top5(200.0, 900.0);
    std::uniform_real_distribution<double> ratio(1.05, 1.8);
    std::uniform_real_distribution<double> bench(0.8, 1.2);
    std::uniform_real_distribution<double> burn(0.5, 1.0);
    std::normal_distribution<double> feature(0.0, 1.0);
    pcwlab::Dataset d;
    d.split_tag = tag;
    for (std::size_t i = 0; i < n; ++i) {
        pcwlab::CustomerRecord r;
        r.id = static_cast<std::int64_t>(i);
        for (double& f : r.features) f = feature(gen);
        r.avg_top5 = top5(gen);
        r.avg_top6_10 = r.avg_top5 * ratio(gen);
        r.benchmark_premium = r.avg_top5 * bench(gen);
        r.burn_cost = r.avg_top5 * burn(gen);
        d.records.push_back(r);
    }
    return d;
}

inline pcwlab::GenConfig small_config(std::uint64_t seed = 7) {
    pcwlab::GenConfig c;
    c.n_customers = 500;
    c.n_train = 400;
    c.n_test = 100;
    c.n_resamples = 50000;
    c.seed = seed;
    return c;
}

// Oracle demand curve written out independently of the library.
inline double demand(double z) {
    if (z < -8.0) return 0.2;
    if (z >= 0.0) return 0.0;
    return 0.2 * (1.0 - (z / 8.0 + 1.0) * (z / 8.0 + 1.0));
}

// The analytic curve sampled at the bin centres, as a binned model.
inline pcwlab::FittedConversionModel binned_truth() {
    std::vector<double> v(pcwlab::FittedConversionModel::kBinCount);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = demand(static_cast<double>(static_cast<std::int64_t>(i) - 600) * 0.01);
    }
    return pcwlab::FittedConversionModel(v);
}

}  // namespace fixtures
