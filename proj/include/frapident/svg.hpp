#ifndef FRAPIDENT_SVG_HPP
#define FRAPIDENT_SVG_HPP

#include <string>
#include <vector>

#include "frapident/likelihood.hpp"
#include "frapident/relationships.hpp"

namespace frapident {

// Minimal standalone SVG emitters; plots are conveniences, the CSVs next to
// them are the contract.

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;
};

void plot_lines_svg(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series,
                    const std::vector<double>& hlines = {});

void plot_profile_svg(const std::string& path, const ProfileResult& profile,
                      const std::string& title);

// values row-major |x_grid| x |y_grid|.
void plot_heatmap_svg(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<double>& x_grid, const std::vector<double>& y_grid,
                      const std::vector<double>& values, bool log_color = false);

struct FieldMarker {
    std::string label;
    double x = 0.0;
    double y = 0.0;
    std::string color = "#d62728";
};

// Slope field as oriented segments, with optional overlaid curves (tau,
// contour traces) and point markers (P, Q).
void plot_field_svg(const std::string& path, const std::string& title, const SlopeField& field,
                    const std::vector<PlotSeries>& curves,
                    const std::vector<FieldMarker>& markers);

}  // namespace frapident

#endif
