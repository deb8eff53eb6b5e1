#include "falcon/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace falcon {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

std::string render_regret_svg(const RunResult& result) {
    if (result.records.size() < 2)
        throw std::invalid_argument("render_regret_svg: need at least two logged rounds");

    const double W = 900.0, H = 540.0;
    const double L = 70.0, R = 30.0, Tm = 40.0, B = 50.0;
    const double plot_w = W - L - R, plot_h = H - Tm - B;

    std::vector<double> bound_series;
    bound_series.reserve(result.records.size());
    for (const auto& rec : result.records)
        bound_series.push_back(regret_bound(result.config, rec.round));

    const double x_max = static_cast<double>(result.horizon);
    double y_max = 1.0;
    for (const auto& rec : result.records) y_max = std::max(y_max, rec.cum_regret);
    for (double b : bound_series) y_max = std::max(y_max, b);

    // log10(1 + y) vertical scale keeps the regret curve readable next to the
    // much larger theoretical bound.
    const double y_top = std::log10(1.0 + y_max);
    auto sx = [&](double t) { return L + plot_w * (t / x_max); };
    auto sy = [&](double y) {
        return Tm + plot_h * (1.0 - std::log10(1.0 + std::max(0.0, y)) / y_top);
    };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "  <rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
        << "\" fill=\"white\"/>\n";
    svg << "  <text x=\"" << L << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">"
        << "cumulative regret — " << result.config.algorithm << ", seed " << result.seed
        << ", T = " << result.horizon << "</text>\n";

    // axes
    svg << "  <line x1=\"" << L << "\" y1=\"" << Tm << "\" x2=\"" << L << "\" y2=\"" << (H - B)
        << "\" stroke=\"black\"/>\n";
    svg << "  <line x1=\"" << L << "\" y1=\"" << (H - B) << "\" x2=\"" << (W - R) << "\" y2=\""
        << (H - B) << "\" stroke=\"black\"/>\n";

    // decade gridlines on the log scale
    for (double tick = 0.0;; tick += 1.0) {
        const double y_val = std::pow(10.0, tick) - 1.0;  // 0, 9, 99, ...
        const double label = std::pow(10.0, tick);
        if (std::log10(1.0 + y_val) > y_top + 1e-9) break;
        const double y = sy(y_val);
        svg << "  <line x1=\"" << L << "\" y1=\"" << y << "\" x2=\"" << (W - R) << "\" y2=\"" << y
            << "\" stroke=\"#dddddd\"/>\n";
        svg << "  <text x=\"" << (L - 8) << "\" y=\"" << (y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
            << (tick == 0.0 ? std::string("0") : num(label - 1.0)) << "</text>\n";
        if (tick > 12.0) break;
    }
    for (int i = 0; i <= 5; ++i) {
        const double t = x_max * i / 5.0;
        svg << "  <text x=\"" << sx(t) << "\" y=\"" << (H - B + 18)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
            << num(t) << "</text>\n";
    }

    auto polyline = [&](const char* color, const char* dash, auto value_at) {
        svg << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (dash[0] != '\0') svg << " stroke-dasharray=\"" << dash << "\"";
        svg << " points=\"";
        for (std::size_t i = 0; i < result.records.size(); ++i) {
            if (i) svg << " ";
            svg << sx(static_cast<double>(result.records[i].round)) << "," << sy(value_at(i));
        }
        svg << "\"/>\n";
    };
    polyline("#d62728", "6,4", [&](std::size_t i) { return bound_series[i]; });
    polyline("#1f77b4", "", [&](std::size_t i) { return result.records[i].cum_regret; });

    const double bound_T = bound_series.back();
    svg << "  <text x=\"" << (W - R) << "\" y=\"" << (Tm + 16)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\" fill=\"#d62728\">"
        << "bound(T) = " << num(bound_T) << "</text>\n";
    svg << "  <text x=\"" << (W - R) << "\" y=\"" << (Tm + 34)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\" fill=\"#1f77b4\">"
        << "regret(T) = " << num(result.final_cum_regret) << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void emit_plot(const RunResult& result, const std::string& path) {
    const std::string svg = render_regret_svg(result);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace falcon
