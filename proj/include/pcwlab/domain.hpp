#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pcwlab {

inline constexpr std::size_t kFeatureCount = 16;

/// One price-comparison-site quote request: customer attributes plus the market
/// quantile prices, the insurer's benchmark premium and the expected claims cost.
struct CustomerRecord {
    std::int64_t id = 0;
    std::array<double, kFeatureCount> features{};
    double avg_top5 = 0.0;
    double avg_top6_10 = 0.0;
    double benchmark_premium = 0.0;
    double burn_cost = 0.0;

    // Throws ValidationError naming the first violated invariant.
    void validate() const;
};

/// The discrete set of premium multipliers. Point k is lo + k * step; both endpoints
/// are included, so the default grid has 601 points.
class ActionGrid {
public:
    ActionGrid() : ActionGrid(0.7, 1.3, 0.001) {}
    ActionGrid(double lo, double hi, double step);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double step() const noexcept { return step_; }
    std::size_t count() const noexcept { return count_; }

    // Throws BoundsError for index >= count.
    double value(std::size_t index) const;
    // Unchecked; index must be < count.
    double operator[](std::size_t index) const noexcept {
        return lo_ + static_cast<double>(index) * step_;
    }
    // Index of the grid point closest to multiplier, clamped to the grid.
    std::size_t nearest_index(double multiplier) const noexcept;
    bool contains(std::size_t index) const noexcept { return index < count_; }

    friend bool operator==(const ActionGrid&, const ActionGrid&) = default;

private:
    double lo_;
    double hi_;
    double step_;
    std::size_t count_;
};

// Multiplier applied to the benchmark premium. Throws ValidationError on non-finite
// input or a multiplier outside [0.7, 1.3].
double premium_for(const CustomerRecord& record, double multiplier);

double action_value(const ActionGrid& grid, std::size_t index);

/// Outcome of one quote. reward is premium - burn_cost when accepted and 0 otherwise.
struct QuoteOutcome {
    std::int64_t customer_id = 0;
    std::size_t action_index = 0;
    double premium = 0.0;
    bool accepted = false;
    double reward = 0.0;

    static QuoteOutcome make(const CustomerRecord& record, std::size_t action_index,
                             double premium, bool accepted);
};

enum class SplitTag { train, test };

struct Dataset {
    std::vector<CustomerRecord> records;
    SplitTag split_tag = SplitTag::train;

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }
    // Checks every record plus id uniqueness.
    void validate() const;
};

// Throws ValidationError if any id appears in both datasets.
void check_disjoint(const Dataset& a, const Dataset& b);

// CSV: id,f1..f16,avg_top5,avg_top6_10,benchmark_premium,burn_cost with 17 significant digits.
std::string dataset_csv_header();
void write_dataset_csv(std::ostream& out, const Dataset& data);
std::string dataset_to_csv(const Dataset& data);
// Throws ArtifactError on malformed input.
Dataset dataset_from_csv(const std::string& text, SplitTag tag);

}  // namespace pcwlab
