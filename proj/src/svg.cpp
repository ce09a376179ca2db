#include "gasket/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "gasket/graph.hpp"

namespace gasket::io {

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", x);
    return buf;
}

// Two-stop ramp from pale to saturated blue.
std::string ramp_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(239.0 + t * (8.0 - 239.0)));
    const int g = static_cast<int>(std::lround(243.0 + t * (48.0 - 243.0)));
    const int b = static_cast<int>(std::lround(255.0 + t * (107.0 - 255.0)));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

std::string render_svg(const ValueMap& values, double scale) {
    const double margin = 1.2 * scale;
    const double legend_width = 70.0;

    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    double vmin = 0.0, vmax = 0.0;
    bool first = true;
    for (const auto& [v, value] : values.entries) {
        auto [ex, ey] = embed(v);
        xmin = first ? ex : std::min(xmin, ex);
        xmax = first ? ex : std::max(xmax, ex);
        ymin = first ? ey : std::min(ymin, ey);
        ymax = first ? ey : std::max(ymax, ey);
        vmax = first ? value : std::max(vmax, value);
        vmin = first ? value : std::min(vmin, value);
        first = false;
    }
    vmin = std::min(vmin, 0.0);  // anchor the ramp at zero
    const double span = vmax > vmin ? vmax - vmin : 1.0;

    const double width = (xmax - xmin) * scale + 2 * margin + legend_width;
    const double height = std::max((ymax - ymin) * scale + 2 * margin, 160.0);
    auto px = [&](double ex) { return margin + (ex - xmin) * scale; };
    auto py = [&](double ey) { return margin + (ymax - ey) * scale; };

    std::unordered_map<Vertex, double, VertexHash> lookup(values.entries.begin(),
                                                          values.entries.end());

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width)
       << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height)
       << "\">\n"
       << "<defs><linearGradient id=\"ramp\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">"
       << "<stop offset=\"0\" stop-color=\"" << ramp_color(0.0) << "\"/>"
       << "<stop offset=\"1\" stop-color=\"" << ramp_color(1.0) << "\"/>"
       << "</linearGradient></defs>\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    os << "<g stroke=\"#b0b0b0\" stroke-width=\"" << num(scale * 0.05) << "\">\n";
    for (const auto& [v, value] : values.entries) {
        for (Vertex w : neighbors(v)) {
            if (!(v < w) || !lookup.count(w)) continue;
            auto [ax, ay] = embed(v);
            auto [bx, by] = embed(w);
            os << "<line x1=\"" << num(px(ax)) << "\" y1=\"" << num(py(ay)) << "\" x2=\""
               << num(px(bx)) << "\" y2=\"" << num(py(by)) << "\"/>\n";
        }
    }
    os << "</g>\n";

    for (const auto& [v, value] : values.entries) {
        auto [ex, ey] = embed(v);
        os << "<circle cx=\"" << num(px(ex)) << "\" cy=\"" << num(py(ey)) << "\" r=\""
           << num(scale * 0.18) << "\" fill=\"" << ramp_color((value - vmin) / span) << "\"/>\n";
    }

    // Legend strip with the value range.
    const double lx = width - legend_width + 10.0;
    os << "<rect x=\"" << num(lx) << "\" y=\"20\" width=\"14\" height=\"" << num(height - 60.0)
       << "\" fill=\"url(#ramp)\" stroke=\"#606060\" stroke-width=\"0.5\"/>\n"
       << "<text x=\"" << num(lx + 20.0) << "\" y=\"28\" font-family=\"monospace\" font-size=\"11\">"
       << format_double(vmax) << "</text>\n"
       << "<text x=\"" << num(lx + 20.0) << "\" y=\"" << num(height - 36.0)
       << "\" font-family=\"monospace\" font-size=\"11\">" << format_double(vmin) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace gasket::io
