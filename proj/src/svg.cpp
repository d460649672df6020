#include "fleetopt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fleetopt/csv.hpp"
#include "fleetopt/errors.hpp"

namespace fleetopt {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 90.0;
constexpr double kMarginRight = 30.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

std::string render_line_chart(const std::string& title,
                              const std::vector<Series>& series) {
    std::size_t n_points = 0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& s : series) {
        n_points = std::max(n_points, s.values.size());
        for (double v : s.values) {
            if (std::isnan(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (n_points == 0 || !std::isfinite(lo))
        throw ValidationError("chart needs at least one finite data point");
    if (lo == hi) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto x_of = [&](std::size_t i) {
        if (n_points == 1) return kMarginLeft + plot_w / 2.0;
        return kMarginLeft + plot_w * static_cast<double>(i) /
                                 static_cast<double>(n_points - 1);
    };
    const auto y_of = [&](double v) {
        return kMarginTop + plot_h * (1.0 - (v - lo) / (hi - lo));
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
       << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
       << kHeight << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

    // Axes.
    os << "<line x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(kMarginTop)
       << "\" x2=\"" << fmt(kMarginLeft) << "\" y2=\"" << fmt(kHeight - kMarginBottom)
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(kHeight - kMarginBottom)
       << "\" x2=\"" << fmt(kWidth - kMarginRight) << "\" y2=\""
       << fmt(kHeight - kMarginBottom) << "\" stroke=\"black\"/>\n";

    // Y ticks.
    for (int t = 0; t <= 4; ++t) {
        const double v = lo + (hi - lo) * t / 4.0;
        const double y = y_of(v);
        os << "<line x1=\"" << fmt(kMarginLeft - 4) << "\" y1=\"" << fmt(y)
           << "\" x2=\"" << fmt(kMarginLeft) << "\" y2=\"" << fmt(y)
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(kMarginLeft - 8) << "\" y=\"" << fmt(y + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           << fmt_tick(v) << "</text>\n";
    }
    // One x tick per generation.
    for (std::size_t i = 0; i < n_points; ++i) {
        const double x = x_of(i);
        os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kHeight - kMarginBottom)
           << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(kHeight - kMarginBottom + 4)
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kHeight - kMarginBottom + 18)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << (i + 1) << "</text>\n";
    }
    os << "<text x=\"" << fmt(kMarginLeft + plot_w / 2) << "\" y=\""
       << fmt(kHeight - 12)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
          "generation</text>\n";

    int legend_row = 0;
    for (const auto& s : series) {
        bool pen_down = false;
        std::string path;
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            if (std::isnan(s.values[i])) {
                pen_down = false;
                continue;
            }
            path += pen_down ? " L " : " M ";
            path += fmt(x_of(i)) + " " + fmt(y_of(s.values[i]));
            pen_down = true;
        }
        os << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << s.color
           << "\" stroke-width=\"2\"/>\n";
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            if (std::isnan(s.values[i])) continue;
            os << "<circle cx=\"" << fmt(x_of(i)) << "\" cy=\"" << fmt(y_of(s.values[i]))
               << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
        }
        const double ly = kMarginTop + 14.0 * legend_row++;
        os << "<line x1=\"" << fmt(kWidth - kMarginRight - 150) << "\" y1=\"" << fmt(ly)
           << "\" x2=\"" << fmt(kWidth - kMarginRight - 120) << "\" y2=\"" << fmt(ly)
           << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << fmt(kWidth - kMarginRight - 114) << "\" y=\"" << fmt(ly + 4)
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string render_history_chart(const std::string& history_csv) {
    const CsvTable table = parse_csv(history_csv);
    const int gen_col = table.column("generation");
    const int fstar_col = table.column("f_star");
    const int pred_col = table.column("best_prediction");
    if (gen_col < 0 || fstar_col < 0 || pred_col < 0)
        throw ValidationError(
            "history CSV needs generation, f_star and best_prediction columns");
    if (table.rows.empty())
        throw ValidationError("history CSV has no data rows");

    Series simulated{"best simulated", "#1f77b4", {}};
    Series predicted{"best predicted", "#d62728", {}};
    for (const auto& row : table.rows) {
        simulated.values.push_back(std::stod(row[fstar_col]));
        const std::string& p = row[pred_col];
        predicted.values.push_back(
            p.empty() || p == "nan" ? std::numeric_limits<double>::quiet_NaN()
                                    : std::stod(p));
    }
    return render_line_chart("Best simulated and predicted fitness per generation",
                             {simulated, predicted});
}

} // namespace fleetopt
