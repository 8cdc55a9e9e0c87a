#include "frapident/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace frapident {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write file: " + path);
    return out;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

void save_curve_csv(const std::string& path, const FrapCurve& curve) {
    auto out = open_out(path);
    out << "time_s,intensity\n";
    for (std::size_t i = 0; i < curve.times.size(); ++i)
        out << format_number(curve.times[i]) << "," << format_number(curve.values[i]) << "\n";
}

FrapCurve load_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open curve CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("empty curve CSV: " + path);
    if (strip_cr(line) != "time_s,intensity")
        throw InvalidArgument("curve CSV must start with header 'time_s,intensity': " + path);

    FrapCurve curve;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 2)
            throw InvalidArgument(path + ":" + std::to_string(line_no) + ": expected 2 columns");
        try {
            curve.times.push_back(std::stod(fields[0]));
            curve.values.push_back(std::stod(fields[1]));
        } catch (const std::exception&) {
            throw InvalidArgument(path + ":" + std::to_string(line_no) + ": bad number");
        }
    }
    validate_curve(curve);
    return curve;
}

void save_profile_csv(const std::string& path, const ProfileResult& profile) {
    auto out = open_out(path);
    out << "interest,value,loglik,likelihood,threshold,c,D,beta1,beta2\n";
    for (std::size_t i = 0; i < profile.grid.size(); ++i) {
        const ModelParams& p = profile.optima[i];
        out << profile.interest << "," << format_number(profile.grid[i]) << ","
            << format_number(profile.loglik[i]) << "," << format_number(profile.likelihood[i])
            << "," << format_number(profile.threshold) << "," << format_number(p.c) << ","
            << format_number(p.D) << "," << format_number(p.beta1) << ","
            << format_number(p.beta2) << "\n";
    }
}

void save_surface_csv(const std::string& path, const Surface2D& surface) {
    auto out = open_out(path);
    out << "c,D,loglik,likelihood,beta1_opt,beta2_opt\n";
    for (std::size_t i = 0; i < surface.c_grid.size(); ++i) {
        for (std::size_t j = 0; j < surface.D_grid.size(); ++j) {
            const std::size_t idx = surface.index(i, j);
            out << format_number(surface.c_grid[i]) << "," << format_number(surface.D_grid[j])
                << "," << format_number(surface.loglik[idx]) << ","
                << format_number(surface.likelihood[idx]) << ","
                << format_number(surface.optima[idx].beta1) << ","
                << format_number(surface.optima[idx].beta2) << "\n";
        }
    }
}

void save_subset_csv(const std::string& path, const SubsetProfile& subset) {
    auto out = open_out(path);
    out << "log10_beta1,log10_beta2_opt,loglik\n";
    for (std::size_t i = 0; i < subset.beta1_log10.size(); ++i)
        out << format_number(subset.beta1_log10[i]) << ","
            << format_number(subset.beta2_opt_log10[i]) << "," << format_number(subset.loglik[i])
            << "\n";
}

void save_lse_csv(const std::string& path, const std::vector<double>& beta1_grid,
                  const std::vector<double>& beta2_grid, const std::vector<double>& lse) {
    if (lse.size() != beta1_grid.size() * beta2_grid.size())
        throw InvalidArgument("save_lse_csv: grid size mismatch");
    auto out = open_out(path);
    out << "log10_beta1,log10_beta2,lse\n";
    for (std::size_t i = 0; i < beta1_grid.size(); ++i)
        for (std::size_t j = 0; j < beta2_grid.size(); ++j)
            out << format_number(beta1_grid[i]) << "," << format_number(beta2_grid[j]) << ","
                << format_number(lse[i * beta2_grid.size() + j]) << "\n";
}

void save_field_csv(const std::string& path, const SlopeField& field) {
    auto out = open_out(path);
    out << "log10_beta1,log10_beta2,slope,flag\n";
    for (std::size_t i = 0; i < field.b1_nodes.size(); ++i)
        for (std::size_t j = 0; j < field.b2_nodes.size(); ++j) {
            const std::size_t idx = field.index(i, j);
            out << format_number(field.b1_nodes[i]) << "," << format_number(field.b2_nodes[j])
                << "," << format_number(field.slope[idx]) << ","
                << static_cast<int>(field.flag[idx]) << "\n";
        }
}

void save_tau_csv(const std::string& path, const TauCurve& tau) {
    auto out = open_out(path);
    out << "s,log10_beta1,log10_beta2\n";
    for (std::size_t i = 0; i < tau.s.size(); ++i)
        out << format_number(tau.s[i]) << "," << format_number(tau.beta1_log10[i]) << ","
            << format_number(tau.beta2_log10[i]) << "\n";
}

void save_trace_csv(const std::string& path, const ContourTrace& trace) {
    auto out = open_out(path);
    out << "log10_beta1,log10_beta2,lse\n";
    for (std::size_t i = 0; i < trace.beta1_log10.size(); ++i)
        out << format_number(trace.beta1_log10[i]) << "," << format_number(trace.beta2_log10[i])
            << "," << format_number(trace.lse[i]) << "\n";
}

}  // namespace frapident
