#include "pcwlab/domain.hpp"

#include <cmath>
#include <ostream>
#include <string_view>
#include <unordered_set>

#include "pcwlab/error.hpp"
#include "pcwlab/io.hpp"

namespace pcwlab {

namespace {

constexpr double kMultiplierLo = 0.7;
constexpr double kMultiplierHi = 1.3;
constexpr double kMultiplierSlack = 1e-9;

std::string record_tag(const CustomerRecord& r) { return "customer " + std::to_string(r.id); }

}  // namespace

void CustomerRecord::validate() const {
    for (double f : features) {
        if (!std::isfinite(f)) throw ValidationError(record_tag(*this) + ": non-finite feature");
    }
    auto positive = [&](double v, const char* name) {
        if (!(std::isfinite(v) && v > 0.0)) {
            throw ValidationError(record_tag(*this) + ": " + name + " must be positive");
        }
    };
    positive(avg_top5, "avg_top5");
    positive(avg_top6_10, "avg_top6_10");
    positive(benchmark_premium, "benchmark_premium");
    positive(burn_cost, "burn_cost");
    if (!(avg_top6_10 > avg_top5)) {
        throw ValidationError(record_tag(*this) + ": avg_top6_10 must exceed avg_top5");
    }
}

ActionGrid::ActionGrid(double lo, double hi, double step) : lo_(lo), hi_(hi), step_(step) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && std::isfinite(step)) || !(step > 0.0) ||
        !(hi >= lo)) {
        throw ValidationError("action grid needs finite lo <= hi and step > 0");
    }
    const double spans = (hi - lo) / step;
    const double rounded = std::round(spans);
    if (std::abs(spans - rounded) > 1e-6) {
        throw ValidationError("action grid step does not divide [lo, hi]");
    }
    count_ = static_cast<std::size_t>(rounded) + 1;
}

double ActionGrid::value(std::size_t index) const {
    if (index >= count_) {
        throw BoundsError("action index " + std::to_string(index) + " outside grid of " +
                          std::to_string(count_));
    }
    return (*this)[index];
}

std::size_t ActionGrid::nearest_index(double multiplier) const noexcept {
    const double k = std::round((multiplier - lo_) / step_);
    if (!(k > 0.0)) return 0;
    if (k >= static_cast<double>(count_ - 1)) return count_ - 1;
    return static_cast<std::size_t>(k);
}

double action_value(const ActionGrid& grid, std::size_t index) { return grid.value(index); }

double premium_for(const CustomerRecord& record, double multiplier) {
    if (!std::isfinite(multiplier) || !std::isfinite(record.benchmark_premium)) {
        throw ValidationError("premium_for: non-finite input");
    }
    if (multiplier < kMultiplierLo - kMultiplierSlack ||
        multiplier > kMultiplierHi + kMultiplierSlack) {
        throw ValidationError("premium_for: multiplier outside [0.7, 1.3]");
    }
    return multiplier * record.benchmark_premium;
}

QuoteOutcome QuoteOutcome::make(const CustomerRecord& record, std::size_t action_index,
                                double premium, bool accepted) {
    return QuoteOutcome{record.id, action_index, premium, accepted,
                        accepted ? premium - record.burn_cost : 0.0};
}

void Dataset::validate() const {
    std::unordered_set<std::int64_t> ids;
    ids.reserve(records.size());
    for (const auto& r : records) {
        r.validate();
        if (!ids.insert(r.id).second) {
            throw ValidationError("duplicate customer id " + std::to_string(r.id));
        }
    }
}

void check_disjoint(const Dataset& a, const Dataset& b) {
    std::unordered_set<std::int64_t> ids;
    for (const auto& r : a.records) ids.insert(r.id);
    for (const auto& r : b.records) {
        if (ids.contains(r.id)) {
            throw ValidationError("customer id " + std::to_string(r.id) + " in both splits");
        }
    }
}

std::string dataset_csv_header() {
    std::string h = "id";
    for (std::size_t i = 1; i <= kFeatureCount; ++i) h += ",f" + std::to_string(i);
    h += ",avg_top5,avg_top6_10,benchmark_premium,burn_cost";
    return h;
}

std::string dataset_to_csv(const Dataset& data) {
    std::string out = dataset_csv_header();
    out += '\n';
    out.reserve(data.records.size() * 420);
    for (const auto& r : data.records) {
        out += std::to_string(r.id);
        for (double f : r.features) {
            out += ',';
            io::append_g17(out, f);
        }
        for (double v : {r.avg_top5, r.avg_top6_10, r.benchmark_premium, r.burn_cost}) {
            out += ',';
            io::append_g17(out, v);
        }
        out += '\n';
    }
    return out;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) { out << dataset_to_csv(data); }

Dataset dataset_from_csv(const std::string& text, SplitTag tag) {
    Dataset data;
    data.split_tag = tag;
    std::string_view rest(text);
    auto next_line = [&rest]() {
        const auto nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        return line;
    };
    if (next_line() != dataset_csv_header()) throw ArtifactError("dataset CSV: bad header");
    constexpr std::size_t kColumns = 1 + kFeatureCount + 4;
    std::size_t line_no = 1;
    while (!rest.empty()) {
        std::string_view line = next_line();
        ++line_no;
        if (line.empty()) continue;
        std::array<std::string_view, kColumns> cells;
        std::size_t n = 0;
        while (true) {
            const auto comma = line.find(',');
            if (n == kColumns) throw ArtifactError("dataset CSV: too many columns on line " +
                                                   std::to_string(line_no));
            cells[n++] = line.substr(0, comma);
            if (comma == std::string_view::npos) break;
            line.remove_prefix(comma + 1);
        }
        if (n != kColumns) {
            throw ArtifactError("dataset CSV: expected " + std::to_string(kColumns) +
                                " columns on line " + std::to_string(line_no));
        }
        CustomerRecord r;
        r.id = io::parse_int(cells[0]);
        for (std::size_t i = 0; i < kFeatureCount; ++i) r.features[i] = io::parse_double(cells[1 + i]);
        r.avg_top5 = io::parse_double(cells[kFeatureCount + 1]);
        r.avg_top6_10 = io::parse_double(cells[kFeatureCount + 2]);
        r.benchmark_premium = io::parse_double(cells[kFeatureCount + 3]);
        r.burn_cost = io::parse_double(cells[kFeatureCount + 4]);
        data.records.push_back(r);
    }
    try {
        data.validate();
    } catch (const ValidationError& e) {
        throw ArtifactError(std::string("dataset CSV: ") + e.what());
    }
    return data;
}

}  // namespace pcwlab
