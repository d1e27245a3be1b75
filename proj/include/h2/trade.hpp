#pragma once
#include "h2/lcoh.hpp"
#include "h2/solver.hpp"

#include <map>
#include <string>
#include <vector>

// International hydrogen trading: country supply curves (special-ordered-set
// piecewise costs), integer shipping fleets per route, an unbounded
// international backstop, and the resulting carbon ledger.
//
// Quantities are TWh/year of hydrogen; objective is carried in millions of
// euros (1 EUR/MWh * 1 TWh = 1 MEUR) to keep the solver well scaled.

namespace h2::trade {

struct CountrySupply {
    std::string country;
    int year = 2030;
    lcoh::SupplyCurve curve;    // breakpoints (cumulative TWh/year, EUR/MWh)
    double export_cap_twh = 0.0; // annual export ceiling net of domestic use
};

struct Route {
    std::string from, to;
    double distance_km = 0.0;
    double ship_capacity_twh = 1.0;       // per ship per year
    double ship_annualised_cost_eur = 0.0;
    double fuel_cost_eur_per_twh_km = 0.0;
};

struct TradeInstance {
    int year = 2030;
    std::vector<CountrySupply> supplies;
    std::map<std::string, double> demands_twh;
    std::vector<Route> routes;
    bool backstop_enabled = true;
    double backstop_price_eur_per_mwh = 150.0;
    bool backstop_green = false;
    double carbon_factor_t_per_mwh = 0.3;

    void validate() const;
    static TradeInstance from_json_file(const std::string& path);
};

// Variable handles of one country's piecewise production cost.
struct PiecewiseCost {
    int quantity_var = -1; // TWh
    int cost_var = -1;     // MEUR
    std::vector<int> lambda_vars;
    std::vector<int> segment_binaries;
};

// Appends the SOS2-style encoding of the supply curve to `milp`: point
// weights with adjacency enforced by segment binaries; exact on breakpoints,
// linear in between. Non-monotone curves are rejected.
PiecewiseCost piecewise_cost(solver::MilpProblem& milp, const lcoh::SupplyCurve& curve);

// ceil(quantity / capacity) ships plus fuel cost, in euros.
struct ShippingCost {
    double cost_eur = 0.0;
    long ships = 0;
};
ShippingCost shipping_cost(const Route& route, double quantity_twh);

struct TradeModel {
    solver::MilpProblem milp;
    std::vector<PiecewiseCost> production;  // per supply
    std::vector<int> flow_vars;             // per route, TWh
    std::vector<int> ship_vars;             // per route, integer
    std::vector<std::string> importers;     // demand > 0
    std::vector<int> backstop_vars;         // per importer (or -1)
};

TradeModel build_trade_milp(const TradeInstance& inst);

struct TradePlan {
    solver::Status status = solver::Status::Infeasible;
    std::vector<std::tuple<std::string, std::string, double>> flows; // from, to, TWh ("ITN" = backstop)
    std::map<std::string, long> ships;                               // per route key "from->to"
    std::map<std::string, double> production_twh;
    double objective_meur = 0.0;
};

TradePlan solve_trade(const TradeInstance& inst);
TradePlan solve_trade(const TradeInstance& inst, const TradeModel& model);

struct CarbonLedger {
    std::map<std::string, double> reduction_mt;                    // per importer
    std::map<std::string, std::map<std::string, double>> attribution; // importer -> exporter -> Mt
    double total_mt = 0.0;
};

// Green hydrogen consumed times the displacement factor; backstop volumes
// count only when the backstop is configured as green.
CarbonLedger carbon_reduction(const TradePlan& plan, double factor_t_per_mwh, bool backstop_green);

} // namespace h2::trade
