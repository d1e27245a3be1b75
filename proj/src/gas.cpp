#include "h2/gas.hpp"
#include "h2/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace h2::gas {

ConstantsTable ConstantsTable::from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open gas constants file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    auto comp = [&](const char* key) {
        const auto& c = j.at(key);
        return ComponentProps{c.at("hhv_mj_m3").get<double>(), c.at("specific_gravity").get<double>(),
                              c.at("flame_coeff").get<double>(), c.at("air_requirement").get<double>()};
    };
    ConstantsTable t;
    t.h2 = comp("h2");
    t.ch4 = comp("ch4");
    return t;
}

void GasComposition::validate() const {
    if (h2_fraction < -1e-9 || ch4_fraction < -1e-9)
        throw ValidationError("gas composition: negative fraction");
    if (std::abs(h2_fraction + ch4_fraction - 1.0) > 1e-6)
        throw ValidationError("gas composition: fractions must sum to 1");
}

GasComposition GasComposition::blend(double h2_fraction) {
    GasComposition c{h2_fraction, 1.0 - h2_fraction};
    c.validate();
    return c;
}

double hhv_mj_m3(const GasComposition& c, const ConstantsTable& t) {
    return c.h2_fraction * t.h2.hhv_mj_m3 + c.ch4_fraction * t.ch4.hhv_mj_m3;
}

double specific_gravity(const GasComposition& c, const ConstantsTable& t) {
    return c.h2_fraction * t.h2.specific_gravity + c.ch4_fraction * t.ch4.specific_gravity;
}

double wobbe_index(const GasComposition& c, const ConstantsTable& t) {
    return hhv_mj_m3(c, t) / std::sqrt(specific_gravity(c, t));
}

double weaver_factor(const GasComposition& c, const ConstantsTable& t) {
    const double num = c.h2_fraction * t.h2.flame_coeff + c.ch4_fraction * t.ch4.flame_coeff;
    const double den = c.h2_fraction * t.h2.air_requirement + c.ch4_fraction * t.ch4.air_requirement + 1.0;
    return num / den;
}

void SecurityRegion::validate() const {
    if (wobbe_min >= wobbe_max || density_min >= density_max || weaver_min >= weaver_max)
        throw ValidationError("security region: each axis needs min < max");
    if (h2_fraction_cap < 0.0 || h2_fraction_cap > 1.0)
        throw ValidationError("security region: hydrogen cap must lie in [0,1]");
}

SecurityCheck check_security(const GasComposition& c, const SecurityRegion& region,
                             const ConstantsTable& t) {
    c.validate();
    region.validate();
    SecurityCheck r;
    const double wi = wobbe_index(c, t);
    if (wi < region.wobbe_min - 1e-9 || wi > region.wobbe_max + 1e-9) r.violations.push_back("wobbe");
    const double sg = specific_gravity(c, t);
    if (sg < region.density_min - 1e-9 || sg > region.density_max + 1e-9) r.violations.push_back("density");
    const double wf = weaver_factor(c, t);
    if (wf < region.weaver_min - 1e-9 || wf > region.weaver_max + 1e-9) r.violations.push_back("weaver");
    if (c.h2_fraction > region.h2_fraction_cap + 1e-9) r.violations.push_back("h2_cap");
    r.pass = r.violations.empty();
    return r;
}

GasComposition mix_at_node(const std::vector<std::pair<double, GasComposition>>& inflows) {
    double total = 0.0, h2 = 0.0;
    for (const auto& [flow, comp] : inflows) {
        if (flow < -1e-9) throw ValidationError("gas mixing: negative inflow");
        comp.validate();
        total += flow;
        h2 += flow * comp.h2_fraction;
    }
    if (total <= 0.0) throw ValidationError("gas mixing: all inflows zero, composition undefined");
    return GasComposition::blend(h2 / total);
}

double weymouth_residual(double p_from_bar, double p_to_bar, double flow, double weymouth_k) {
    return p_from_bar * p_from_bar - p_to_bar * p_to_bar - weymouth_k * flow * std::abs(flow);
}

double weymouth_flow(double p_from_bar, double p_to_bar, double weymouth_k) {
    if (weymouth_k <= 0.0) throw ValidationError("weymouth: K must be positive");
    const double dsq = p_from_bar * p_from_bar - p_to_bar * p_to_bar;
    const double mag = std::sqrt(std::abs(dsq) / weymouth_k);
    return dsq >= 0.0 ? mag : -mag;
}

std::array<solver::Row, 4> mccormick(const Box& box, int x_var, int y_var, int w_var) {
    if (box.x_lo > box.x_hi || box.y_lo > box.y_hi)
        throw ValidationError("mccormick: degenerate box (lo > hi)");
    using solver::Row;
    using solver::Sense;
    std::array<Row, 4> rows;
    // w >= xl*y + yl*x - xl*yl
    rows[0] = Row{{{w_var, -1.0}, {y_var, box.x_lo}, {x_var, box.y_lo}}, Sense::LE, box.x_lo * box.y_lo};
    // w >= xu*y + yu*x - xu*yu
    rows[1] = Row{{{w_var, -1.0}, {y_var, box.x_hi}, {x_var, box.y_hi}}, Sense::LE, box.x_hi * box.y_hi};
    // w <= xu*y + yl*x - xu*yl
    rows[2] = Row{{{w_var, 1.0}, {y_var, -box.x_hi}, {x_var, -box.y_lo}}, Sense::LE, -box.x_hi * box.y_lo};
    // w <= xl*y + yu*x - xl*yu
    rows[3] = Row{{{w_var, 1.0}, {y_var, -box.x_lo}, {x_var, -box.y_hi}}, Sense::LE, -box.x_lo * box.y_hi};
    return rows;
}

} // namespace h2::gas
