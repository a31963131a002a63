#include "curveflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace curveflow {

namespace {

const char* kPalette[] = {"#1b6ca8", "#d1495b", "#66a182", "#edae49", "#8d96a3",
                          "#573280", "#2e4057", "#c97b63", "#00798c", "#9a8c98"};
constexpr int kPaletteSize = 10;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Box {
    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -std::numeric_limits<double>::infinity();
    double y0 = std::numeric_limits<double>::infinity();
    double y1 = -std::numeric_limits<double>::infinity();
    void add(double x, double y) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
};

}  // namespace

void svg_curves(const std::string& path, const std::vector<std::pair<double, Points>>& snapshots) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);

    Box box;
    for (const auto& [t, X] : snapshots)
        for (int i = 0; i < X.rows(); ++i) box.add(X(i, 0), X(i, 1));
    if (snapshots.empty()) box = Box{0, 1, 0, 1};
    const double pad = 0.05 * std::max(box.x1 - box.x0, box.y1 - box.y0) + 1e-9;
    const double w = 640.0, h = 640.0;
    const double sx = (w - 120.0) / (box.x1 - box.x0 + 2 * pad);
    const double sy = (h - 40.0) / (box.y1 - box.y0 + 2 * pad);
    const double s = std::min(sx, sy);
    auto px = [&](double x) { return 20.0 + s * (x - box.x0 + pad); };
    auto py = [&](double y) { return h - 20.0 - s * (y - box.y0 + pad); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    int idx = 0;
    for (const auto& [t, X] : snapshots) {
        const char* color = kPalette[idx % kPaletteSize];
        out << "<polygon fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (int i = 0; i < X.rows(); ++i) out << num(px(X(i, 0))) << ',' << num(py(X(i, 1))) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << w - 95.0 << "\" y=\"" << 20.0 + 16.0 * idx << "\" fill=\"" << color
            << "\" font-size=\"12\">t=" << num(t) << "</text>\n";
        ++idx;
    }
    out << "</svg>\n";
}

void svg_chart(const std::string& path, const std::string& title, const std::vector<double>& x,
               const std::vector<SvgSeries>& series, bool log_y) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);

    auto map_y = [&](double v) { return log_y ? std::log10(std::max(v, 1e-300)) : v; };
    Box box;
    for (size_t i = 0; i < x.size(); ++i)
        for (const SvgSeries& sr : series)
            if (i < sr.y.size()) box.add(x[i], map_y(sr.y[i]));
    if (!(box.x1 > box.x0)) box.x1 = box.x0 + 1.0;
    if (!(box.y1 > box.y0)) box.y1 = box.y0 + 1.0;

    const double w = 720.0, h = 480.0, ml = 70.0, mr = 120.0, mt = 40.0, mb = 50.0;
    auto px = [&](double v) { return ml + (w - ml - mr) * (v - box.x0) / (box.x1 - box.x0); };
    auto py = [&](double v) { return h - mb - (h - mt - mb) * (v - box.y0) / (box.y1 - box.y0); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << ml << "\" y=\"24\" font-size=\"15\">" << title << "</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\"" << h - mb
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
        << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double vx = box.x0 + k * (box.x1 - box.x0) / 4.0;
        const double vy = box.y0 + k * (box.y1 - box.y0) / 4.0;
        out << "<text x=\"" << px(vx) - 10 << "\" y=\"" << h - mb + 18 << "\" font-size=\"11\">"
            << num(vx) << "</text>\n";
        out << "<text x=\"6\" y=\"" << py(vy) + 4 << "\" font-size=\"11\">"
            << (log_y ? "1e" + num(vy) : num(vy)) << "</text>\n";
    }
    int idx = 0;
    for (const SvgSeries& sr : series) {
        const char* color = kPalette[idx % kPaletteSize];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < x.size() && i < sr.y.size(); ++i)
            out << num(px(x[i])) << ',' << num(py(map_y(sr.y[i]))) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << w - mr + 8 << "\" y=\"" << mt + 16.0 * idx + 8 << "\" fill=\"" << color
            << "\" font-size=\"12\">" << sr.name << "</text>\n";
        ++idx;
    }
    out << "</svg>\n";
}

}  // namespace curveflow
