#include "klm3d/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "klm3d/io.hpp"

namespace klm3d {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 72.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 48.0;
constexpr double kMarginBottom = 72.0;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string pct(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%+.1f%%", v * 100.0);
    return buf;
}

double nice_ceiling(double v) {
    if (v <= 0.0) return 1.0;
    const double magnitude = std::pow(10.0, std::floor(std::log10(v)));
    for (double step : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (v <= step * magnitude) return step * magnitude;
    }
    return 10.0 * magnitude;
}

void rect(std::string& out, double x, double y, double w, double h, const char* fill) {
    out += "  <rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
           "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
}

void text(std::string& out, double x, double y, const char* anchor, const char* style,
          const std::string& content) {
    out += "  <text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor +
           "\" " + style + ">" + content + "</text>\n";
}

} // namespace

std::string render_svg_chart(const EvalReport& report) {
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const double base_y = kMarginTop + plot_h;

    double max_mean = 0.0;
    for (const auto& m : report.modalities)
        max_mean = std::max({max_mean, m.mean_predicted_ms, m.mean_actual_ms});
    const double y_max = nice_ceiling(max_mean * 1.1);
    const auto y_of = [&](double ms) { return base_y - plot_h * (ms / y_max); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
           "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " +
           num(kHeight) + "\">\n";
    rect(out, 0, 0, kWidth, kHeight, "#ffffff");
    text(out, kWidth / 2.0, 24.0, "middle",
         "font-family=\"sans-serif\" font-size=\"16\" font-weight=\"bold\"",
         "Predicted vs. actual mean trial time");

    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double value = y_max * i / ticks;
        const double y = y_of(value);
        out += "  <line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(y) + "\" x2=\"" +
               num(kWidth - kMarginRight) + "\" y2=\"" + num(y) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        text(out, kMarginLeft - 8.0, y + 4.0, "end",
             "font-family=\"sans-serif\" font-size=\"11\" fill=\"#444444\"", num(value));
    }
    text(out, 16.0, kMarginTop - 16.0, "start",
         "font-family=\"sans-serif\" font-size=\"11\" fill=\"#444444\"", "ms");

    const std::size_t n = report.modalities.size();
    if (n > 0) {
        const double group_w = plot_w / static_cast<double>(n);
        const double bar_w = std::min(48.0, group_w * 0.32);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& m = report.modalities[i];
            const double cx = kMarginLeft + group_w * (static_cast<double>(i) + 0.5);
            const double yp = y_of(m.mean_predicted_ms);
            const double ya = y_of(m.mean_actual_ms);
            rect(out, cx - bar_w - 2.0, yp, bar_w, base_y - yp, "#4878a8");
            rect(out, cx + 2.0, ya, bar_w, base_y - ya, "#d08a40");
            const double label_y = std::min(yp, ya) - 8.0;
            text(out, cx, label_y, "middle",
                 "font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\"",
                 pct(m.percent_difference));
            text(out, cx, base_y + 18.0, "middle",
                 "font-family=\"sans-serif\" font-size=\"12\"", to_string(m.modality));
            text(out, cx, base_y + 34.0, "middle",
                 "font-family=\"sans-serif\" font-size=\"10\" fill=\"#666666\"",
                 "n=" + std::to_string(m.n_kept) +
                     (m.tost.equivalent ? ", equivalent" : ", not equivalent"));
        }
    }

    const double legend_x = kMarginLeft + 4.0;
    const double legend_y = kHeight - 22.0;
    rect(out, legend_x, legend_y - 10.0, 12.0, 12.0, "#4878a8");
    text(out, legend_x + 18.0, legend_y, "start",
         "font-family=\"sans-serif\" font-size=\"12\"", "predicted");
    rect(out, legend_x + 100.0, legend_y - 10.0, 12.0, 12.0, "#d08a40");
    text(out, legend_x + 118.0, legend_y, "start",
         "font-family=\"sans-serif\" font-size=\"12\"", "actual");
    out += "</svg>\n";
    return out;
}

void save_svg_chart(const EvalReport& report, const std::string& path) {
    write_text_file(path, render_svg_chart(report));
}

} // namespace klm3d
