#include "frapident/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace frapident {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 30, kTop = 40, kBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (lo > hi) {
            lo = 0.0;
            hi = 1.0;
        }
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double margin = 0.04 * (hi - lo);
        lo -= margin;
        hi += margin;
    }
};

struct Axes {
    Range x, y;
    double sx(double v) const { return kLeft + (v - x.lo) / (x.hi - x.lo) * (kWidth - kLeft - kRight); }
    double sy(double v) const {
        return kHeight - kBottom - (v - y.lo) / (y.hi - y.lo) * (kHeight - kTop - kBottom);
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::ofstream open_svg(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write SVG: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return out;
}

void draw_frame(std::ofstream& out, const Axes& ax, const std::string& title,
                const std::string& x_label, const std::string& y_label) {
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
        << "\" height=\"" << kHeight - kTop - kBottom
        << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kTop - 14
        << "\" text-anchor=\"middle\" font-size=\"15\" font-family=\"sans-serif\">" << title
        << "</text>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 16 "
        << kHeight / 2 << ")\">" << y_label << "</text>\n";
    for (int t = 0; t <= 5; ++t) {
        const double fx = ax.x.lo + (ax.x.hi - ax.x.lo) * t / 5.0;
        const double fy = ax.y.lo + (ax.y.hi - ax.y.lo) * t / 5.0;
        const double px = ax.sx(fx);
        const double py = ax.sy(fy);
        out << "<line x1=\"" << px << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << px
            << "\" y2=\"" << kHeight - kBottom + 5 << "\" stroke=\"#444\"/>\n";
        out << "<text x=\"" << px << "\" y=\"" << kHeight - kBottom + 18
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << num(fx)
            << "</text>\n";
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py << "\" x2=\"" << kLeft << "\" y2=\""
            << py << "\" stroke=\"#444\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << num(fy)
            << "</text>\n";
    }
}

void draw_series(std::ofstream& out, const Axes& ax, const PlotSeries& s, const char* color) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.y[i])) continue;
        out << ax.sx(s.x[i]) << "," << ax.sy(s.y[i]) << " ";
    }
    out << "\"/>\n";
    if (s.markers) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            out << "<circle cx=\"" << ax.sx(s.x[i]) << "\" cy=\"" << ax.sy(s.y[i])
                << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        }
    }
}

// Blue -> white -> red diverging map on [0,1].
std::string ramp_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const auto lerp = [](int a, int b, double f) { return static_cast<int>(a + (b - a) * f); };
    int r, g, b;
    if (t < 0.5) {
        const double f = t / 0.5;
        r = lerp(33, 247, f);
        g = lerp(75, 247, f);
        b = lerp(160, 247, f);
    } else {
        const double f = (t - 0.5) / 0.5;
        r = lerp(247, 178, f);
        g = lerp(247, 24, f);
        b = lerp(247, 43, f);
    }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

void plot_lines_svg(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series, const std::vector<double>& hlines) {
    Axes ax;
    for (const auto& s : series) {
        for (double v : s.x) ax.x.add(v);
        for (double v : s.y) ax.y.add(v);
    }
    for (double h : hlines) ax.y.add(h);
    ax.x.pad();
    ax.y.pad();

    auto out = open_svg(path);
    draw_frame(out, ax, title, x_label, y_label);
    for (double h : hlines) {
        out << "<line x1=\"" << kLeft << "\" y1=\"" << ax.sy(h) << "\" x2=\"" << kWidth - kRight
            << "\" y2=\"" << ax.sy(h)
            << "\" stroke=\"#888\" stroke-width=\"1.2\" stroke-dasharray=\"6 4\"/>\n";
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % std::size(kPalette)];
        draw_series(out, ax, series[i], color);
        out << "<text x=\"" << kWidth - kRight - 8 << "\" y=\"" << kTop + 18 + 16 * i
            << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color
            << "\" font-family=\"sans-serif\">" << series[i].label << "</text>\n";
    }
    out << "</svg>\n";
}

void plot_profile_svg(const std::string& path, const ProfileResult& profile,
                      const std::string& title) {
    PlotSeries s;
    s.label = "profile likelihood";
    s.x = profile.grid;
    s.y = profile.likelihood;
    s.markers = true;
    plot_lines_svg(path, title + " [" + to_string(profile.classification) + "]",
                   profile.interest, "likelihood", {s}, {profile.threshold});
}

void plot_heatmap_svg(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<double>& x_grid, const std::vector<double>& y_grid,
                      const std::vector<double>& values, bool log_color) {
    if (values.size() != x_grid.size() * y_grid.size())
        throw InvalidArgument("plot_heatmap_svg: value size mismatch");

    Axes ax;
    for (double v : x_grid) ax.x.add(v);
    for (double v : y_grid) ax.y.add(v);
    ax.x.pad();
    ax.y.pad();

    Range vr;
    for (double v : values) vr.add(log_color ? std::log10(std::max(v, 1e-300)) : v);
    if (vr.lo > vr.hi) {
        vr.lo = 0;
        vr.hi = 1;
    }
    if (vr.lo == vr.hi) vr.hi = vr.lo + 1;

    auto out = open_svg(path);
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        const double x0 = i == 0 ? ax.x.lo : 0.5 * (x_grid[i - 1] + x_grid[i]);
        const double x1 = i + 1 == x_grid.size() ? ax.x.hi : 0.5 * (x_grid[i] + x_grid[i + 1]);
        for (std::size_t j = 0; j < y_grid.size(); ++j) {
            const double y0 = j == 0 ? ax.y.lo : 0.5 * (y_grid[j - 1] + y_grid[j]);
            const double y1 = j + 1 == y_grid.size() ? ax.y.hi : 0.5 * (y_grid[j] + y_grid[j + 1]);
            double v = values[i * y_grid.size() + j];
            if (log_color) v = std::log10(std::max(v, 1e-300));
            const double t = (v - vr.lo) / (vr.hi - vr.lo);
            out << "<rect x=\"" << ax.sx(x0) << "\" y=\"" << ax.sy(y1) << "\" width=\""
                << ax.sx(x1) - ax.sx(x0) << "\" height=\"" << ax.sy(y0) - ax.sy(y1) << "\" fill=\""
                << ramp_color(t) << "\"/>\n";
        }
    }
    draw_frame(out, ax, title, x_label, y_label);
    out << "</svg>\n";
}

void plot_field_svg(const std::string& path, const std::string& title, const SlopeField& field,
                    const std::vector<PlotSeries>& curves,
                    const std::vector<FieldMarker>& markers) {
    Axes ax;
    for (double v : field.b1_nodes) ax.x.add(v);
    for (double v : field.b2_nodes) ax.y.add(v);
    for (const auto& c : curves) {
        for (double v : c.x) ax.x.add(v);
        for (double v : c.y) ax.y.add(v);
    }
    for (const auto& m : markers) {
        ax.x.add(m.x);
        ax.y.add(m.y);
    }
    ax.x.pad();
    ax.y.pad();

    auto out = open_svg(path);
    draw_frame(out, ax, title, "log10 beta1", "log10 beta2");

    const double cell = std::min((kWidth - kLeft - kRight) / field.b1_nodes.size(),
                                 (kHeight - kTop - kBottom) / field.b2_nodes.size());
    const double arm = 0.38 * cell;
    for (std::size_t i = 0; i < field.b1_nodes.size(); ++i) {
        for (std::size_t j = 0; j < field.b2_nodes.size(); ++j) {
            const std::size_t idx = field.index(i, j);
            const double px = ax.sx(field.b1_nodes[i]);
            const double py = ax.sy(field.b2_nodes[j]);
            if (field.flag[idx]) {
                out << "<circle cx=\"" << px << "\" cy=\"" << py
                    << "\" r=\"2\" fill=\"#bbb\"/>\n";
                continue;
            }
            const double slope = field.slope[idx];
            const double norm = std::sqrt(1.0 + slope * slope);
            const double dx = arm / norm;
            const double dy = -arm * slope / norm;  // svg y grows downward
            out << "<line x1=\"" << px - dx << "\" y1=\"" << py - dy << "\" x2=\"" << px + dx
                << "\" y2=\"" << py + dy << "\" stroke=\"#555\" stroke-width=\"1.2\"/>\n";
            out << "<circle cx=\"" << px + dx << "\" cy=\"" << py + dy
                << "\" r=\"1.6\" fill=\"#555\"/>\n";
        }
    }
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const char* color = kPalette[(i + 2) % std::size(kPalette)];
        draw_series(out, ax, curves[i], color);
        out << "<text x=\"" << kWidth - kRight - 8 << "\" y=\"" << kTop + 18 + 16 * i
            << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color
            << "\" font-family=\"sans-serif\">" << curves[i].label << "</text>\n";
    }
    for (const auto& m : markers) {
        out << "<circle cx=\"" << ax.sx(m.x) << "\" cy=\"" << ax.sy(m.y) << "\" r=\"5\" fill=\""
            << m.color << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ax.sx(m.x) + 8 << "\" y=\"" << ax.sy(m.y) - 6
            << "\" font-size=\"13\" font-family=\"sans-serif\">" << m.label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace frapident
