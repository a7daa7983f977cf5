#pragma once

#include <string>

#include "pcwlab/evaluator.hpp"

namespace pcwlab {

// Self-contained SVG with two panels: cumulative expected reward (left) and cumulative
// realised reward (right), one line per agent.
std::string render_curves_svg(const CumulativeCurves& curves);

// Ranking table derived from the final values of the curves.
std::vector<SummaryRow> summarize_curves(const CumulativeCurves& curves);

}  // namespace pcwlab
