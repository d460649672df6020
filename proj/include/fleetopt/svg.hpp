#pragma once

#include <string>
#include <vector>

namespace fleetopt {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> values; // one point per generation, NaNs skipped
};

/// Renders a best-so-far line chart (one x tick per generation) as a
/// standalone SVG document. Output contains no timestamps, so identical
/// inputs give byte-identical files.
std::string render_line_chart(const std::string& title,
                              const std::vector<Series>& series);

/// Reads a run history CSV (columns generation, f_star, best_prediction)
/// and renders the simulated and predicted series.
std::string render_history_chart(const std::string& history_csv);

} // namespace fleetopt
