#include "bitekit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace bitekit {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string num_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace

std::string render_panels(const std::string& figure_title, const std::vector<PlotPanel>& panels) {
    const double panel_w = 420, panel_h = 280;
    const double margin_l = 58, margin_r = 16, margin_t = 36, margin_b = 42;
    const int cols = panels.size() > 1 ? 2 : 1;
    const int rows = static_cast<int>((panels.size() + cols - 1) / cols);
    const double fig_w = cols * panel_w + 20;
    const double fig_h = rows * panel_h + 46;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fig_w << "\" height=\"" << fig_h
        << "\" viewBox=\"0 0 " << fig_w << " " << fig_h << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << fig_w / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\" font-weight=\"bold\">" << figure_title
        << "</text>\n";

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const PlotPanel& panel = panels[p];
        const double ox = (p % cols) * panel_w + 10;
        const double oy = (p / cols) * panel_h + 36;
        const double x0 = ox + margin_l, y0 = oy + margin_t;
        const double width = panel_w - margin_l - margin_r;
        const double height = panel_h - margin_t - margin_b;

        double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = 0.0;
        for (const auto& pt : panel.points) {
            xmin = std::min(xmin, pt.x);
            xmax = std::max(xmax, pt.x);
            ymin = std::min(ymin, pt.lower);
            ymax = std::max(ymax, pt.upper);
        }
        if (panel.points.empty()) {
            xmin = 0;
            xmax = 1;
        }
        if (xmax == xmin) xmax = xmin + 1;
        double pad = 0.08 * (ymax - ymin);
        if (pad == 0.0) pad = 1.0;
        ymin -= pad;
        ymax += pad;
        auto sx = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * width; };
        auto sy = [&](double y) { return y0 + (ymax - y) / (ymax - ymin) * height; };

        svg << "<text x=\"" << ox + panel_w / 2 << "\" y=\"" << oy + 22
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
            << panel.title << "</text>\n";
        svg << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << width << "\" height=\""
            << height << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";

        // zero reference line
        if (ymin < 0.0 && ymax > 0.0)
            svg << "<line x1=\"" << x0 << "\" y1=\"" << num(sy(0)) << "\" x2=\"" << x0 + width
                << "\" y2=\"" << num(sy(0))
                << "\" stroke=\"#c33\" stroke-width=\"1\" stroke-dasharray=\"5,4\"/>\n";
        if (panel.draw_vline && panel.vline_x > xmin && panel.vline_x < xmax)
            svg << "<line x1=\"" << num(sx(panel.vline_x)) << "\" y1=\"" << y0 << "\" x2=\""
                << num(sx(panel.vline_x)) << "\" y2=\"" << y0 + height
                << "\" stroke=\"#888\" stroke-width=\"1\" stroke-dasharray=\"3,3\"/>\n";

        for (const auto& pt : panel.points) {
            svg << "<line x1=\"" << num(sx(pt.x)) << "\" y1=\"" << num(sy(pt.lower)) << "\" x2=\""
                << num(sx(pt.x)) << "\" y2=\"" << num(sy(pt.upper))
                << "\" stroke=\"#3366aa\" stroke-width=\"1.6\"/>\n";
            svg << "<circle cx=\"" << num(sx(pt.x)) << "\" cy=\"" << num(sy(pt.estimate))
                << "\" r=\"3\" fill=\"#224477\"/>\n";
        }

        // axis ticks: x at every point, y at 5 even positions
        for (const auto& pt : panel.points) {
            svg << "<text x=\"" << num(sx(pt.x)) << "\" y=\"" << y0 + height + 16
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">"
                << num_tick(pt.x) << "</text>\n";
        }
        for (int i = 0; i <= 4; ++i) {
            double y = ymin + (ymax - ymin) * i / 4.0;
            svg << "<text x=\"" << x0 - 6 << "\" y=\"" << num(sy(y) + 3)
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"9\">"
                << num_tick(y) << "</text>\n";
        }
        svg << "<text x=\"" << ox + panel_w / 2 << "\" y=\"" << oy + panel_h - 8
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << panel.x_label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace bitekit
