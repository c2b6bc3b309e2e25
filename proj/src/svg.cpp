#include "dimred/svg.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include "dimred/error.hpp"

namespace dimred {

namespace {

// Category palette (20 entries); labels cycle through it modulo 20.
constexpr std::array<const char*, 20> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
    "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896",
    "#c5b0d5", "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5"};

} // namespace

void render_scatter_svg(const Embedding& embedding, const std::optional<std::vector<int>>& labels,
                        const std::string& path, int width, int height) {
    if (embedding.dim() < 2)
        throw Error(ErrorCode::dimension_too_low, "scatter plot needs at least 2 coordinates");
    if (labels && static_cast<Eigen::Index>(labels->size()) != embedding.n())
        throw Error(ErrorCode::invalid_param, "label count does not match embedding rows");
    if (width < 16 || height < 16)
        throw Error(ErrorCode::invalid_param, "width and height must be at least 16");

    const Eigen::Index n = embedding.n();
    double x_min = embedding.coords(0, 0), x_max = x_min;
    double y_min = embedding.coords(0, 1), y_max = y_min;
    for (Eigen::Index i = 1; i < n; ++i) {
        x_min = std::min(x_min, embedding.coords(i, 0));
        x_max = std::max(x_max, embedding.coords(i, 0));
        y_min = std::min(y_min, embedding.coords(i, 1));
        y_max = std::max(y_max, embedding.coords(i, 1));
    }
    double x_range = x_max - x_min;
    double y_range = y_max - y_min;
    if (x_range == 0.0) x_range = 1.0;
    if (y_range == 0.0) y_range = 1.0;
    const double x_lo = x_min - 0.05 * x_range;
    const double y_lo = y_min - 0.05 * y_range;
    const double x_span = 1.1 * x_range;
    const double y_span = 1.1 * y_range;

    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "viewBox=\"0 0 %d %d\">\n",
                  width, height, width, height);
    out << buf;
    std::snprintf(buf, sizeof(buf), "<rect width=\"%d\" height=\"%d\" fill=\"#ffffff\"/>\n", width,
                  height);
    out << buf;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double px = (embedding.coords(i, 0) - x_lo) / x_span * width;
        // SVG y grows downward; flip so larger coordinates plot higher.
        const double py = height - (embedding.coords(i, 1) - y_lo) / y_span * height;
        const char* color =
            labels ? kPalette[static_cast<std::size_t>(
                         ((*labels)[static_cast<std::size_t>(i)] % 20 + 20) % 20)]
                   : kPalette[0];
        std::snprintf(buf, sizeof(buf), "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"%s\"/>\n",
                      px, py, color);
        out << buf;
    }
    out << "</svg>\n";
    if (!out) throw Error(ErrorCode::io_error, "failed while writing " + path);
}

} // namespace dimred
