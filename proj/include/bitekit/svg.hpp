#pragma once

#include <string>
#include <vector>

namespace bitekit {

// Coefficient-path panels (point estimate plus interval per x position)
// rendered directly as standalone SVG. One panel per series group.
struct PlotPoint {
    double x = 0.0;
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

struct PlotPanel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotPoint> points;
    double vline_x = 0.0;  // e.g. the reform year
    bool draw_vline = false;
};

// Lays the panels out in a 2-column grid with a horizontal zero line in
// each panel; returns the SVG document.
std::string render_panels(const std::string& figure_title, const std::vector<PlotPanel>& panels);

}  // namespace bitekit
