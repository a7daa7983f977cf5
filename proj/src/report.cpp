#include "pcwlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace pcwlab {

namespace {

constexpr const char* kPalette[] = {"#9467bd", "#8c564b", "#1f77b4", "#ff7f0e",
                                    "#2ca02c", "#d62728", "#17becf", "#7f7f7f"};
constexpr double kPanelWidth = 520.0;
constexpr double kPanelHeight = 360.0;
constexpr double kMargin = 60.0;
constexpr std::size_t kMaxPoints = 700;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void panel(std::string& svg, const std::vector<std::string>& agents,
           const std::vector<std::vector<double>>& series, double x0, const std::string& title) {
    const std::size_t n = series.empty() ? 0 : series.front().size();
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& s : series) {
        for (double v : s) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi - lo < 1e-9) hi = lo + 1.0;
    const double left = x0 + kMargin;
    const double top = 40.0;
    const double width = kPanelWidth - kMargin - 10.0;
    const double height = kPanelHeight - 80.0;
    auto px = [&](std::size_t t) {
        return left + (n <= 1 ? 0.0 : width * static_cast<double>(t) / static_cast<double>(n - 1));
    };
    auto py = [&](double v) { return top + height * (hi - v) / (hi - lo); };

    svg += "<text x=\"" + num(x0 + kPanelWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-size=\"14\">" + title + "</text>\n";
    svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(width) +
           "\" height=\"" + num(height) + "\" fill=\"none\" stroke=\"#444\"/>\n";
    if (lo < 0.0 && hi > 0.0) {
        svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(py(0.0)) + "\" x2=\"" + num(left + width) +
               "\" y2=\"" + num(py(0.0)) + "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        svg += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(v) + 4) +
               "\" text-anchor=\"end\" font-size=\"10\">" + num(v) + "</text>\n";
    }
    svg += "<text x=\"" + num(left + width / 2) + "\" y=\"" + num(top + height + 30) +
           "\" text-anchor=\"middle\" font-size=\"11\">customers quoted (" + std::to_string(n) +
           ")</text>\n";

    const std::size_t stride = std::max<std::size_t>(1, (n + kMaxPoints - 1) / kMaxPoints);
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::string points;
        for (std::size_t t = 0; t < n; t += stride) points += num(px(t)) + "," + num(py(series[i][t])) + " ";
        if (n > 0 && (n - 1) % stride != 0) points += num(px(n - 1)) + "," + num(py(series[i][n - 1]));
        svg += "<polyline fill=\"none\" stroke-width=\"1.6\" stroke=\"" +
               std::string(kPalette[i % std::size(kPalette)]) + "\" points=\"" + points + "\"/>\n";
    }
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const double y = top + 14.0 + 14.0 * static_cast<double>(i);
        svg += "<line x1=\"" + num(left + 8) + "\" y1=\"" + num(y - 4) + "\" x2=\"" + num(left + 26) +
               "\" y2=\"" + num(y - 4) + "\" stroke=\"" + kPalette[i % std::size(kPalette)] +
               "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(left + 30) + "\" y=\"" + num(y) + "\" font-size=\"10\">" + agents[i] +
               "</text>\n";
    }
}

}  // namespace

std::string render_curves_svg(const CumulativeCurves& curves) {
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(2 * kPanelWidth) +
                      "\" height=\"" + num(kPanelHeight) + "\" font-family=\"sans-serif\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    panel(svg, curves.agents, curves.expected, 0.0, "Cumulative expected reward");
    panel(svg, curves.agents, curves.realised, kPanelWidth, "Cumulative realised reward");
    svg += "</svg>\n";
    return svg;
}

std::vector<SummaryRow> summarize_curves(const CumulativeCurves& curves) {
    std::vector<SummaryRow> rows(curves.agents.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].agent = curves.agents[i];
        rows[i].cum_expected = curves.expected[i].empty() ? 0.0 : curves.expected[i].back();
        rows[i].cum_realised = curves.realised[i].empty() ? 0.0 : curves.realised[i].back();
        rows[i].acceptance_rate = std::numeric_limits<double>::quiet_NaN();
        rows[i].avg_accepted_premium = std::numeric_limits<double>::quiet_NaN();
    }
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rows[a].cum_expected > rows[b].cum_expected; });
    for (std::size_t r = 0; r < order.size(); ++r) rows[order[r]].rank = r + 1;
    return rows;
}

}  // namespace pcwlab
