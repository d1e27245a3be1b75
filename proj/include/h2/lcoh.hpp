#pragma once
#include <string>
#include <vector>

// Per-cell levelised cost of hydrogen and national cost-supply curves.
// Costs are synthetic-but-realistic config data; the computation is the
// contract. All money in EUR, energy in MWh (HHV basis throughout).

namespace h2::lcoh {

enum class FoundationType { Monopile, Jacket, Floating };
const char* foundation_name(FoundationType f);

// depth < 30 m -> monopile, 30-60 m -> jacket, > 60 m -> floating
FoundationType foundation_type(double depth_m);

enum class Scenario { High, Median, Low };
Scenario scenario_from_string(const std::string& s);
const char* scenario_name(Scenario s);

struct CostModel {
    double devex_eur_per_mw = 0.0;
    double turbine_eur_per_mw = 0.0;
    double foundation_eur_per_mw[3] = {0.0, 0.0, 0.0}; // Monopile, Jacket, Floating
    double array_cable_eur_per_km = 0.0;
    double export_cable_eur_per_km = 0.0;
    double platform_eur_per_mw = 0.0;
    double opex_eur_per_mw_year = 0.0;
    double maintenance_eur_per_km_year = 0.0; // scales with distance to port
    double decex_eur_per_mw = 0.0;
    double discount_rate = 0.07;
    int lifetime_years = 25;

    void validate() const; // non-negative, monopile <= jacket <= floating
};

struct ElectrolyserSpec {
    double efficiency_2030 = 0.79; // HHV fraction
    double efficiency_2050 = 0.82;
    double capex_eur_per_mw = 0.0;
    double opex_fraction_per_year = 0.0; // of electrolyser capex
    double aux_margin = 0.0;             // pumps/desalination/compression, fraction of rating
    double fixed_charge_rate = 0.10;     // annualises capex in the sizing trade-off
    double h2_value_eur_per_mwh = 60.0;  // shadow value used only for sizing

    double efficiency(int year) const; // 2040 interpolates to 0.805
};

// Learning-rate multipliers on 2020-basis LCOH. Median values are fixed;
// high/low scenarios shift them by an additive offset.
struct LearningTable {
    double fixed_median[3] = {0.79, 0.65, 0.51};    // 2030, 2040, 2050
    double floating_median[3] = {0.98, 0.83, 0.60};
    double high_offset = -0.08; // faster cost reduction
    double low_offset = 0.08;
};

struct CostBreakdown {
    double devex = 0.0;
    double capex = 0.0;         // booked at year 0
    double opex_per_year = 0.0; // uniform over the lifetime
    double decex = 0.0;         // booked at end of life
};

struct SizingResult {
    double mw = 0.0;
    bool warning = false; // true when the wind series never produces
};

// Capacity maximising annual hydrogen minus the annualised electrolyser
// charge, swept on a 1% grid of the feasible range E <= rated/(1+aux).
SizingResult size_electrolyser(const std::vector<double>& wind_mw, double rated_wind_mw,
                               const ElectrolyserSpec& spec, int year);

// sum_t eta * min(max(wind_t - aux, 0), E), scaled to a full year.
double annual_hydrogen(const std::vector<double>& wind_mw, double electrolyser_mw, double efficiency,
                       double aux_margin);

// Discounted lifetime cost over discounted lifetime hydrogen.
double lcoh(const CostBreakdown& costs, double annual_h2_mwh, double discount_rate, int lifetime_years);

// year in {2020, 2030, 2040, 2050}; 2020 is the identity.
double apply_learning(double lcoh_eur_mwh, int year, FoundationType foundation, Scenario scenario,
                      const LearningTable& table = {});

// Linear power-density derating with vessel density, floored at 50%.
double derate_density(double base_mw, double normalised_density);

struct LcohResult {
    int cell_id = 0;
    double lat = 0.0, lon = 0.0;
    std::string country;
    FoundationType foundation = FoundationType::Monopile;
    double lcoh_eur_mwh = 0.0; // 2020 basis, before learning
    double annual_h2_mwh = 0.0;
    double installable_mw = 0.0;
};

struct SupplyCurve {
    std::string country;
    int year = 2030;
    Scenario scenario = Scenario::Median;
    // step function: (cumulative capacity GW, learning-adjusted LCOH EUR/MWh)
    std::vector<std::pair<double, double>> breakpoints;

    double total_capacity_gw() const;
    void validate() const; // capacity strictly increasing, lcoh non-decreasing
};

// Cells sorted by learning-adjusted LCOH; cumulative installable capacity.
// Excluded/non-producing cells must already be absent.
SupplyCurve supply_curve(const std::vector<LcohResult>& results, const std::string& country, int year,
                         Scenario scenario, const LearningTable& table = {});

// Full per-cell composition: sizing, yield, cost stack, LCOH.
struct CellEvaluation {
    FoundationType foundation = FoundationType::Monopile;
    double electrolyser_mw = 0.0;
    double annual_h2_mwh = 0.0;
    CostBreakdown costs;
    double lcoh_eur_mwh = 0.0;
    bool producing = false;
};

CellEvaluation evaluate_cell(const std::vector<double>& wind_mw, double installed_mw, double depth_m,
                             double dist_port_km, double dist_connection_km, double array_cable_km,
                             const CostModel& cm, const ElectrolyserSpec& es, int year);

} // namespace h2::lcoh
