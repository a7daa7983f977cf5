#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pcwlab {

/// Competitiveness of a quote: (P - Avg.Top5) / (Avg.Top6-10 - Avg.Top5).
struct NormalizedPrice {
    double z = 0.0;
};

// Throws DegenerateMarketError when avg_top6_10 - avg_top5 <= 1e-9.
NormalizedPrice normalized_price(double premium, double avg_top5, double avg_top6_10);

// Ground-truth demand: 0.2 below z = -8, a concave quadratic down to 0 at z = 0, then 0.
double true_conversion(double z) noexcept;
inline double true_conversion(NormalizedPrice p) noexcept { return true_conversion(p.z); }

// Any z -> probability map; used where the caller may substitute a different curve.
using ConversionCurve = std::function<double(double)>;

// Bin index in hundredths: z rounded half-to-even at the second decimal.
std::int64_t conversion_bin(double z) noexcept;

/// Binned, smoothed, non-increasing conversion estimate on [-6, 6] at 0.01 resolution,
/// extended as a constant outside that range.
class FittedConversionModel {
public:
    static constexpr double kBinWidth = 0.01;
    static constexpr std::int64_t kLoBin = -600;
    static constexpr std::int64_t kHiBin = 600;
    static constexpr std::size_t kBinCount = kHiBin - kLoBin + 1;
    static constexpr int kVersion = 1;

    FittedConversionModel() : values_(kBinCount, 0.0) {}
    // Throws ValidationError unless values has kBinCount non-increasing entries in [0, 1].
    explicit FittedConversionModel(std::vector<double> values);

    double operator()(double z) const noexcept;
    double operator()(NormalizedPrice p) const noexcept { return (*this)(p.z); }

    double bin_center(std::size_t i) const noexcept {
        return static_cast<double>(static_cast<std::int64_t>(i) + kLoBin) * kBinWidth;
    }
    double value_at_bin(std::int64_t bin) const noexcept;
    double left_value() const noexcept { return values_.front(); }
    double right_value() const noexcept { return values_.back(); }
    std::span<const double> values() const noexcept { return values_; }

    std::string to_json() const;
    // Throws ArtifactError on malformed JSON or a version mismatch.
    static FittedConversionModel from_json(const std::string& text);

    friend bool operator==(const FittedConversionModel&, const FittedConversionModel&) = default;

private:
    std::vector<double> values_;
};

/// Everything the fit computed, for diagnostics and plotting.
struct ConversionFit {
    FittedConversionModel model;
    // Per bin on [-6, 6]: sample count and raw empirical acceptance rate (NaN when empty).
    std::vector<std::int64_t> counts;
    std::vector<double> empirical;
};

// Fits the estimator from (z, accepted) pairs. Throws ValidationError on empty or
// mismatched input.
ConversionFit fit_conversion(std::span<const double> z, std::span<const std::uint8_t> accepted);

// In-place running minimum from left to right; the non-increasing projection.
void enforce_non_increasing(std::span<double> values) noexcept;

}  // namespace pcwlab
