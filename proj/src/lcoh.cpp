#include "h2/lcoh.hpp"
#include "h2/errors.hpp"

#include <algorithm>
#include <cmath>

namespace h2::lcoh {

const char* foundation_name(FoundationType f) {
    switch (f) {
        case FoundationType::Monopile: return "monopile";
        case FoundationType::Jacket: return "jacket";
        case FoundationType::Floating: return "floating";
    }
    return "?";
}

FoundationType foundation_type(double depth_m) {
    if (depth_m <= 0.0) throw ValidationError("foundation type: depth must be positive");
    if (depth_m < 30.0) return FoundationType::Monopile;
    if (depth_m <= 60.0) return FoundationType::Jacket;
    return FoundationType::Floating;
}

Scenario scenario_from_string(const std::string& s) {
    if (s == "high") return Scenario::High;
    if (s == "median") return Scenario::Median;
    if (s == "low") return Scenario::Low;
    throw ValidationError("unknown learning scenario: " + s);
}

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::High: return "high";
        case Scenario::Median: return "median";
        case Scenario::Low: return "low";
    }
    return "?";
}

void CostModel::validate() const {
    const double terms[] = {devex_eur_per_mw, turbine_eur_per_mw, foundation_eur_per_mw[0],
                            foundation_eur_per_mw[1], foundation_eur_per_mw[2], array_cable_eur_per_km,
                            export_cable_eur_per_km, platform_eur_per_mw, opex_eur_per_mw_year,
                            maintenance_eur_per_km_year, decex_eur_per_mw};
    for (double t : terms)
        if (t < 0.0) throw ValidationError("cost model: negative cost term");
    if (discount_rate < 0.0 || discount_rate >= 1.0)
        throw ValidationError("cost model: discount rate must lie in [0,1)");
    if (lifetime_years < 1) throw ValidationError("cost model: lifetime must be at least one year");
    if (foundation_eur_per_mw[0] > foundation_eur_per_mw[1] ||
        foundation_eur_per_mw[1] > foundation_eur_per_mw[2])
        throw ValidationError("cost model: foundation costs must be monopile <= jacket <= floating");
}

double ElectrolyserSpec::efficiency(int year) const {
    if (year <= 2030) return efficiency_2030;
    if (year >= 2050) return efficiency_2050;
    const double f = (year - 2030) / 20.0;
    return efficiency_2030 + f * (efficiency_2050 - efficiency_2030);
}

double annual_hydrogen(const std::vector<double>& wind_mw, double electrolyser_mw, double efficiency,
                       double aux_margin) {
    if (wind_mw.empty()) throw ValidationError("annual hydrogen: empty wind series");
    if (electrolyser_mw <= 0.0) return 0.0;
    const double aux = aux_margin * electrolyser_mw;
    double sum = 0.0;
    for (double w : wind_mw) sum += std::min(std::max(w - aux, 0.0), electrolyser_mw);
    return sum * efficiency * 8760.0 / static_cast<double>(wind_mw.size());
}

SizingResult size_electrolyser(const std::vector<double>& wind_mw, double rated_wind_mw,
                               const ElectrolyserSpec& spec, int year) {
    if (wind_mw.empty()) throw ValidationError("electrolyser sizing: empty wind series");
    if (rated_wind_mw <= 0.0) throw ValidationError("electrolyser sizing: rated wind must be positive");
    bool any = false;
    for (double w : wind_mw)
        if (w > 0.0) any = true;
    if (!any) return {0.0, true};

    const double e_max = rated_wind_mw / (1.0 + spec.aux_margin);
    const double charge = spec.capex_eur_per_mw * (spec.fixed_charge_rate + spec.opex_fraction_per_year);
    const double eta = spec.efficiency(year);
    double best_e = 0.0, best_v = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double e = e_max * i / 100.0;
        const double v = spec.h2_value_eur_per_mwh * annual_hydrogen(wind_mw, e, eta, spec.aux_margin) -
                         charge * e;
        if (v > best_v) {
            best_v = v;
            best_e = e;
        }
    }
    return {best_e, false};
}

double lcoh(const CostBreakdown& costs, double annual_h2_mwh, double discount_rate, int lifetime_years) {
    if (annual_h2_mwh <= 0.0) throw ValidationError("lcoh: cell produces no hydrogen");
    double cost_pv = costs.devex + costs.capex; // capex booked at year 0
    double h2_pv = 0.0;
    for (int y = 1; y <= lifetime_years; ++y) {
        const double df = std::pow(1.0 + discount_rate, -y);
        cost_pv += costs.opex_per_year * df;
        h2_pv += annual_h2_mwh * df;
    }
    cost_pv += costs.decex * std::pow(1.0 + discount_rate, -lifetime_years);
    return cost_pv / h2_pv;
}

double apply_learning(double lcoh_eur_mwh, int year, FoundationType foundation, Scenario scenario,
                      const LearningTable& table) {
    if (year == 2020) return lcoh_eur_mwh;
    int idx;
    switch (year) {
        case 2030: idx = 0; break;
        case 2040: idx = 1; break;
        case 2050: idx = 2; break;
        default: throw ValidationError("apply_learning: year must be 2020/2030/2040/2050");
    }
    double mult = (foundation == FoundationType::Floating) ? table.floating_median[idx]
                                                           : table.fixed_median[idx];
    if (scenario == Scenario::High) mult += table.high_offset;
    else if (scenario == Scenario::Low) mult += table.low_offset;
    mult = std::clamp(mult, 0.01, 1.5);
    return lcoh_eur_mwh * mult;
}

double derate_density(double base_mw, double normalised_density) {
    const double d = std::clamp(normalised_density, 0.0, 1.0);
    const double mult = std::max(0.5, 1.0 - 0.5 * d);
    return base_mw * mult;
}

double SupplyCurve::total_capacity_gw() const {
    return breakpoints.empty() ? 0.0 : breakpoints.back().first;
}

void SupplyCurve::validate() const {
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (breakpoints[i].first <= breakpoints[i - 1].first)
            throw ValidationError("supply curve: capacities must be strictly increasing");
        if (breakpoints[i].second < breakpoints[i - 1].second - 1e-9)
            throw ValidationError("supply curve: lcoh must be non-decreasing");
    }
}

SupplyCurve supply_curve(const std::vector<LcohResult>& results, const std::string& country, int year,
                         Scenario scenario, const LearningTable& table) {
    if (results.empty()) throw ValidationError("supply curve: no cells given");
    struct Entry {
        double lcoh;
        double gw;
    };
    std::vector<Entry> entries;
    for (const auto& r : results) {
        if (r.installable_mw <= 0.0) continue;
        entries.push_back({apply_learning(r.lcoh_eur_mwh, year, r.foundation, scenario, table),
                           r.installable_mw / 1000.0});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.lcoh < b.lcoh;
    });
    SupplyCurve curve;
    curve.country = country;
    curve.year = year;
    curve.scenario = scenario;
    double cum = 0.0;
    for (const auto& e : entries) {
        cum += e.gw;
        curve.breakpoints.push_back({cum, e.lcoh});
    }
    curve.validate();
    return curve;
}

CellEvaluation evaluate_cell(const std::vector<double>& wind_mw, double installed_mw, double depth_m,
                             double dist_port_km, double dist_connection_km, double array_cable_km,
                             const CostModel& cm, const ElectrolyserSpec& es, int year) {
    cm.validate();
    CellEvaluation ev;
    ev.foundation = foundation_type(depth_m);
    const auto sizing = size_electrolyser(wind_mw, installed_mw, es, year);
    ev.electrolyser_mw = sizing.mw;
    ev.annual_h2_mwh = annual_hydrogen(wind_mw, sizing.mw, es.efficiency(year), es.aux_margin);
    ev.producing = ev.annual_h2_mwh > 0.0;

    const double f_cost = cm.foundation_eur_per_mw[static_cast<int>(ev.foundation)];
    ev.costs.devex = cm.devex_eur_per_mw * installed_mw;
    ev.costs.capex = (cm.turbine_eur_per_mw + f_cost + cm.platform_eur_per_mw) * installed_mw +
                     es.capex_eur_per_mw * ev.electrolyser_mw +
                     cm.export_cable_eur_per_km * dist_connection_km +
                     cm.array_cable_eur_per_km * array_cable_km;
    ev.costs.opex_per_year = cm.opex_eur_per_mw_year * installed_mw +
                             cm.maintenance_eur_per_km_year * dist_port_km +
                             es.opex_fraction_per_year * es.capex_eur_per_mw * ev.electrolyser_mw;
    ev.costs.decex = cm.decex_eur_per_mw * installed_mw;
    if (ev.producing)
        ev.lcoh_eur_mwh = lcoh(ev.costs, ev.annual_h2_mwh, cm.discount_rate, cm.lifetime_years);
    return ev;
}

} // namespace h2::lcoh
