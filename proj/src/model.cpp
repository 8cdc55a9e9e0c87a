#include "frapident/model.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

namespace frapident {

ValidationResult validate_params(const ModelParams& p) {
    const struct {
        const char* name;
        double value;
    } fields[] = {{"c", p.c}, {"D", p.D}, {"beta1", p.beta1}, {"beta2", p.beta2}};
    for (const auto& f : fields) {
        if (!std::isfinite(f.value)) return {ValidationIssue::NonFinite, f.name};
    }
    for (const auto& f : fields) {
        if (f.value < 0.0) return {ValidationIssue::NonNegativityViolation, f.name};
    }
    return {};
}

void require_valid(const ModelParams& p) {
    const ValidationResult r = validate_params(p);
    if (r.ok()) return;
    if (r.issue == ValidationIssue::NonFinite) throw NonFinite(r.field);
    throw NonNegativityViolation(r.field);
}

std::pair<double, double> equilibrium_fractions(const ModelParams& p, double fallback) {
    require_valid(p);
    if (fallback < 0.0 || fallback > 1.0)
        throw InvalidArgument("equilibrium_fractions: fallback must lie in [0,1]");
    const double total = p.beta1 + p.beta2;
    if (total <= kDegenerateRateEps) return {fallback, 1.0 - fallback};
    const double fu = p.beta2 / total;
    return {fu, 1.0 - fu};
}

void validate_curve(const FrapCurve& curve) {
    if (curve.times.size() != curve.values.size())
        throw InvalidArgument("curve: times/values length mismatch");
    if (curve.times.empty()) throw InvalidArgument("curve: empty");
    if (curve.times.front() != 0.0) throw InvalidArgument("curve: times must start at 0");
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        if (!std::isfinite(curve.times[i])) throw NonFinite("curve.times");
        if (!std::isfinite(curve.values[i])) throw NonFinite("curve.values");
        if (i > 0 && curve.times[i] <= curve.times[i - 1])
            throw InvalidArgument("curve: times must be strictly increasing");
        if (curve.values[i] < 0.0) throw NonNegativityViolation("curve.values");
    }
}

void require_same_time_grid(const FrapCurve& a, const FrapCurve& b) {
    if (a.times.size() != b.times.size())
        throw TimeGridMismatch("curves have different lengths");
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        if (a.times[i] != b.times[i]) throw TimeGridMismatch("curves have different time vectors");
    }
}

const std::vector<RegionConfig>& default_regions() {
    static const std::vector<RegionConfig> regions = {
        {1, {0.05, 0.25, 1e-6, 1e-2}, 0.275, "15 um from the nucleus"},
        {2, {0.1, 1.5, 1e-3, 1e-4}, 0.365, "50 um from the nucleus"},
        {3, {0.1, 0.8, 1e-5, 1e-6}, 0.614, "25 um from the vegetal cortex"},
    };
    return regions;
}

const RegionConfig& find_region(const std::vector<RegionConfig>& regions, int region_id) {
    for (const auto& r : regions) {
        if (r.region_id == region_id) return r;
    }
    throw InvalidArgument("unknown region id: " + std::to_string(region_id));
}

std::vector<RegionConfig> load_regions_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open region config: " + path);
    nlohmann::json j;
    in >> j;
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
        throw InvalidArgument("region config: unsupported schema_version in " + path);

    std::vector<RegionConfig> regions;
    std::set<int> seen;
    for (const auto& e : j.at("regions")) {
        RegionConfig r;
        r.region_id = e.at("region_id").get<int>();
        r.baseline.c = e.at("c").get<double>();
        r.baseline.D = e.at("D").get<double>();
        r.baseline.beta1 = e.at("beta1").get<double>();
        r.baseline.beta2 = e.at("beta2").get<double>();
        r.sigma = e.at("sigma").get<double>();
        if (e.contains("description")) r.description = e["description"].get<std::string>();
        if (!seen.insert(r.region_id).second)
            throw InvalidArgument("region config: duplicate region_id " +
                                  std::to_string(r.region_id));
        if (!(r.sigma > 0.0)) throw InvalidArgument("region config: sigma must be > 0");
        require_valid(r.baseline);
        regions.push_back(std::move(r));
    }
    if (regions.empty()) throw InvalidArgument("region config: no regions in " + path);
    return regions;
}

void save_regions_json(const std::string& path, const std::vector<RegionConfig>& regions) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["regions"] = nlohmann::ordered_json::array();
    for (const auto& r : regions) {
        nlohmann::ordered_json e;
        e["region_id"] = r.region_id;
        e["c"] = r.baseline.c;
        e["D"] = r.baseline.D;
        e["beta1"] = r.baseline.beta1;
        e["beta2"] = r.baseline.beta2;
        e["sigma"] = r.sigma;
        e["description"] = r.description;
        j["regions"].push_back(std::move(e));
    }
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write region config: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace frapident
