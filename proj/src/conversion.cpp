#include "pcwlab/conversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include "json.hpp"

#include "pcwlab/error.hpp"

namespace pcwlab {

namespace {

constexpr double kDegenerateSpread = 1e-9;
// Bins further out than +-10000 in z are folded onto the boundary bin.
constexpr std::int64_t kBinClamp = 1'000'000;
// Moving-average window (R - 0.49, ..., R + 0.50) in bins.
constexpr std::int64_t kWindowBelow = 49;
constexpr std::int64_t kWindowAbove = 50;

}  // namespace

NormalizedPrice normalized_price(double premium, double avg_top5, double avg_top6_10) {
    const double spread = avg_top6_10 - avg_top5;
    if (!(spread > kDegenerateSpread)) {
        throw DegenerateMarketError("normalized price: Avg.Top6-10 does not exceed Avg.Top5");
    }
    return {(premium - avg_top5) / spread};
}

double true_conversion(double z) noexcept {
    if (z < -8.0) return 0.2;
    if (z < 0.0) {
        const double t = z / 8.0 + 1.0;
        return -0.2 * (t * t) + 0.2;
    }
    return 0.0;
}

std::int64_t conversion_bin(double z) noexcept {
    const double scaled = std::nearbyint(z * 100.0);
    if (!(scaled > -static_cast<double>(kBinClamp))) return -kBinClamp;
    if (scaled > static_cast<double>(kBinClamp)) return kBinClamp;
    return static_cast<std::int64_t>(scaled);
}

FittedConversionModel::FittedConversionModel(std::vector<double> values)
    : values_(std::move(values)) {
    if (values_.size() != kBinCount) {
        throw ValidationError("fitted conversion model needs " + std::to_string(kBinCount) +
                              " bins");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
            throw ValidationError("fitted conversion probability outside [0, 1]");
        }
        if (i > 0 && values_[i] > values_[i - 1]) {
            throw ValidationError("fitted conversion model is not non-increasing");
        }
    }
}

double FittedConversionModel::value_at_bin(std::int64_t bin) const noexcept {
    bin = std::clamp(bin, kLoBin, kHiBin);
    return values_[static_cast<std::size_t>(bin - kLoBin)];
}

double FittedConversionModel::operator()(double z) const noexcept {
    return value_at_bin(conversion_bin(z));
}

std::string FittedConversionModel::to_json() const {
    nlohmann::ordered_json j;
    j["bin_width"] = kBinWidth;
    j["lo"] = static_cast<double>(kLoBin) * kBinWidth;
    j["hi"] = static_cast<double>(kHiBin) * kBinWidth;
    j["values"] = values_;
    j["left"] = left_value();
    j["right"] = right_value();
    j["version"] = kVersion;
    return j.dump();
}

FittedConversionModel FittedConversionModel::from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("version").get<int>() != kVersion) {
            throw ArtifactError("conversion model: unsupported version");
        }
        if (j.at("bin_width").get<double>() != kBinWidth ||
            j.at("lo").get<double>() != static_cast<double>(kLoBin) * kBinWidth ||
            j.at("hi").get<double>() != static_cast<double>(kHiBin) * kBinWidth) {
            throw ArtifactError("conversion model: unexpected bin layout");
        }
        FittedConversionModel model(j.at("values").get<std::vector<double>>());
        if (j.at("left").get<double>() != model.left_value() ||
            j.at("right").get<double>() != model.right_value()) {
            throw ArtifactError("conversion model: extrapolation values disagree with bins");
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ArtifactError(std::string("conversion model: ") + e.what());
    } catch (const ValidationError& e) {
        throw ArtifactError(std::string("conversion model: ") + e.what());
    }
}

void enforce_non_increasing(std::span<double> values) noexcept {
    for (std::size_t i = 1; i < values.size(); ++i) {
        values[i] = std::min(values[i - 1], values[i]);
    }
}

ConversionFit fit_conversion(std::span<const double> z, std::span<const std::uint8_t> accepted) {
    if (z.empty()) throw ValidationError("fit_conversion: empty pool");
    if (z.size() != accepted.size()) throw ValidationError("fit_conversion: size mismatch");

    std::vector<std::int64_t> bins(z.size());
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!std::isfinite(z[i])) throw ValidationError("fit_conversion: non-finite z");
        bins[i] = conversion_bin(z[i]);
        lo = std::min(lo, bins[i]);
        hi = std::max(hi, bins[i]);
    }

    const auto span = static_cast<std::size_t>(hi - lo + 1);
    std::vector<std::int64_t> count(span, 0);
    std::vector<std::int64_t> hits(span, 0);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const auto b = static_cast<std::size_t>(bins[i] - lo);
        ++count[b];
        hits[b] += accepted[i] ? 1 : 0;
    }

    // Prefix sums over populated bins: sum of empirical rates and number populated.
    std::vector<double> rate_prefix(span + 1, 0.0);
    std::vector<std::int64_t> populated_prefix(span + 1, 0);
    for (std::size_t b = 0; b < span; ++b) {
        const bool populated = count[b] > 0;
        rate_prefix[b + 1] = rate_prefix[b] +
            (populated ? static_cast<double>(hits[b]) / static_cast<double>(count[b]) : 0.0);
        populated_prefix[b + 1] = populated_prefix[b] + (populated ? 1 : 0);
    }

    const auto signed_span = static_cast<std::int64_t>(span);
    std::vector<double> smoothed(span, 0.0);
    for (std::int64_t b = 0; b < signed_span; ++b) {
        const auto from = static_cast<std::size_t>(std::max<std::int64_t>(0, b - kWindowBelow));
        const auto to = static_cast<std::size_t>(std::min(signed_span, b + kWindowAbove + 1));
        const std::int64_t n = populated_prefix[to] - populated_prefix[from];
        if (n > 0) {
            smoothed[b] = (rate_prefix[to] - rate_prefix[from]) / static_cast<double>(n);
        } else {
            // The first bin is populated, so an empty window always has a left neighbour.
            smoothed[b] = smoothed[b - 1];
        }
    }
    enforce_non_increasing(smoothed);

    std::vector<double> values(FittedConversionModel::kBinCount);
    ConversionFit fit;
    fit.counts.assign(FittedConversionModel::kBinCount, 0);
    fit.empirical.assign(FittedConversionModel::kBinCount, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::int64_t bin = static_cast<std::int64_t>(i) + FittedConversionModel::kLoBin;
        const std::int64_t local = std::clamp(bin, lo, hi) - lo;
        values[i] = smoothed[static_cast<std::size_t>(local)];
        if (bin >= lo && bin <= hi && count[local] > 0) {
            fit.counts[i] = count[local];
            fit.empirical[i] = static_cast<double>(hits[local]) / static_cast<double>(count[local]);
        }
    }
    fit.model = FittedConversionModel(std::move(values));
    return fit;
}

}  // namespace pcwlab
