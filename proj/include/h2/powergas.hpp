#pragma once
#include "h2/gas.hpp"
#include "h2/solver.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

// Coordinated power-gas optimal operation (hourly unit commitment with DC
// flow, SNSP/inertia/must-run/reserve policy, Weymouth gas physics with
// hydrogen blending). The nonconvex parts (f|f| pressure coupling, blend
// fraction times flow) are handled by fixed flow directions, a second-order
// cone relaxation realised as outer-approximation cuts, McCormick envelopes
// with per-iteration box refinement, and sequential convex programming.

namespace h2::powergas {

enum class GenType { Coal, Peat, Oil, Gas, Waste, Hydro, OnshoreWind, Solar, OffshoreWind, Interconnector };
GenType gen_type_from_string(const std::string& s);
const char* gen_type_name(GenType t);
bool is_wind(GenType t);

struct CostSegment {
    double width_mw = 0.0;
    double cost_eur_per_mwh = 0.0;     // counted in the objective
    double heat_mwh_th_per_mwh = 0.0;  // gas offtake per MWh generated (gas units)
};

struct Generator {
    std::string name;
    int bus = 0;
    GenType type = GenType::Gas;
    double pmin_mw = 0.0, pmax_mw = 0.0;
    double ramp_mw_per_h = 1e9;
    int min_up_h = 1, min_down_h = 1;
    double start_cost_eur = 0.0;
    double no_load_cost_eur_per_h = 0.0;
    std::vector<CostSegment> segments;
    double inertia_mws = 0.0;
    bool must_run = false;
    bool synchronous = true;
    bool committable = true; // wind/solar/interconnectors are dispatch-only
    int gas_node = -1;       // gas units draw fuel here
    bool init_on = false;
    int init_hours = 100;    // how long the initial state has persisted
    double init_p_mw = 0.0;

    double fuel_at(double p_mw) const;  // thermal offtake on the gas side
    double cost_at(double p_mw) const;  // direct fuel cost (non-gas units)
};

struct Line {
    int from = 0, to = 0;
    double reactance_pu = 0.1;
    double rating_mw = 0.0;
    double summer_mult = 1.0, winter_mult = 1.0; // seasonal dynamic rating
};

struct GasNode {
    std::string name;
    double supply_cap_kvol_h = 0.0; // natural-gas source capacity (0 = none)
    double supply_cost_eur_per_mwh_th = 0.0;
    double pressure_min_bar = 20.0, pressure_max_bar = 80.0;
    double linepack_kvol = 0.0;      // storage capacity (0 = none)
    double linepack_rate_kvol_h = 0.0;
};

struct Pipeline {
    int from = 0, to = 0;
    double weymouth_k = 0.01; // bar^2 per (kVol/h)^2
    double cap_kvol_h = 0.0;
};

struct Electrolyser {
    std::string name;
    int bus = 0;
    int gas_node = -1; // injection point (-1 = export only)
    double cap_mw = 0.0;
    double efficiency = 0.79; // MWh H2 (HHV) per MWh electricity
};

struct OperationalPolicy {
    double snsp_cap = 0.75;
    int min_synchronous_units = 0;
    double min_inertia_mws = 0.0;
    double reserve_wind_fraction = 0.1;
    double import_cost_eur_per_mwh = 80.0;
    double export_price_eur_per_mwh = 40.0;
};

enum class Season { Summer, Winter };

struct Day {
    std::string name;
    Season season = Season::Summer;
    double weight_days = 91.25; // days of the year this profile represents
    std::vector<std::vector<double>> demand_mw;        // [bus][hour]
    std::vector<std::vector<double>> wind_cf;          // [gen][hour], wind/solar units
    std::vector<std::vector<double>> gas_demand_mwth;  // [gas node][hour]
    int hours() const;
};

struct ComInstance {
    std::vector<std::string> buses;
    std::vector<Line> lines;
    std::vector<Generator> gens;
    std::vector<GasNode> gas_nodes;
    std::vector<Pipeline> pipes;
    std::vector<Electrolyser> electrolysers;
    OperationalPolicy policy;
    gas::SecurityRegion security;
    gas::ConstantsTable constants;
    std::vector<Day> days;

    double blend_cap = 0.0;                 // scenario hydrogen fraction cap
    bool allow_export = false;
    double h2_export_value_eur_per_mwh = 10.0;
    double curtailment_penalty_eur_per_mwh = 0.1;
    double pressure_penalty = 1e-4;         // per bar^2, keeps the cone tight
    double scp_slack_penalty = 1e3;

    void validate() const;
    static ComInstance from_json_file(const std::string& path);

    // effective nodal hydrogen cap: blend cap intersected with the security
    // region's admissible fraction (bisection against check_security)
    double effective_h2_cap() const;
};

// ---- model build ----------------------------------------------------------

struct VarMap {
    int T = 0;
    // power side
    std::vector<std::vector<int>> u, start, shut, p; // [gen][hour]
    std::vector<std::vector<std::vector<int>>> pseg; // [gen][seg][hour]
    std::vector<std::vector<int>> imp, exp;          // interconnectors
    std::vector<std::vector<int>> theta;             // [bus][hour]
    std::vector<std::vector<int>> lflow;             // [line][hour]
    std::vector<std::vector<int>> elec, inj_mwth, export_h2; // [electrolyser][hour]
    std::vector<int> reserve;                        // [hour]
    // gas side
    std::vector<std::vector<int>> supply, dvol, pi, y, wdem, lpk, wlpk; // [node][hour]
    std::vector<std::vector<int>> fpipe, wpipe, wey_slack;              // [pipe][hour]
};

// Sequential-convex state carried between iterations.
struct ScpState {
    int iteration = 0;
    std::vector<std::vector<int>> flow_sign;    // [pipe][hour], +1 along declared orientation
    std::vector<std::vector<double>> y_hat;     // [node][hour]
    std::vector<std::vector<double>> dvol_hat;  // [node][hour]
    std::vector<std::vector<double>> fabs_hat;  // [pipe][hour]
    std::vector<std::vector<double>> lpk_hat;   // [node][hour]
    double box_radius = 1.0;                    // fraction of the full range
};

struct UcModel {
    solver::MilpProblem milp;
    VarMap vars;
};

// One representative day. `scp` == nullptr gives the direction-free first
// pass (no Weymouth coupling). `fixed_commit` pins u[g][t] (oracle support).
UcModel build_uc(const ComInstance& inst, const Day& day, const ScpState* scp = nullptr,
                 const std::vector<std::vector<int>>* fixed_commit = nullptr);

// ---- results ---------------------------------------------------------------

struct HourDispatch {
    std::vector<int> on;          // per gen
    std::vector<double> gen_mw;   // per gen
    std::vector<double> flow_mw;  // per line
    std::vector<double> angle;    // per bus
    std::vector<double> gas_flow_kvol;  // per pipe (signed)
    std::vector<double> pressure_bar;   // per node
    std::vector<double> h2_fraction;    // per node
    double demand_mw = 0.0;
    double elec_mw = 0.0;         // electrolyser draw
    double wind_avail_mw = 0.0;
    double wind_used_mw = 0.0;
    double import_mw = 0.0;
    double export_mw = 0.0;       // electrical export
    double h2_export_mwth = 0.0;
    double h2_export_elec_mw = 0.0; // electricity routed to exported hydrogen
};

struct DayDispatch {
    std::string day_name;
    double weight_days = 0.0;
    std::vector<HourDispatch> hours;
    double cost_eur = 0.0; // objective contribution, penalties excluded
    bool converged = false;
    int scp_iterations = 0;
    double max_weymouth_residual = 0.0; // normalised by p_max^2
    double max_mixing_residual = 0.0;
    bool security_ok = true;
};

struct DispatchResult {
    std::vector<DayDispatch> days;
    double total_cost_eur = 0.0;          // weighted by day weights
    double wind_available_mwh = 0.0;      // weighted annual
    double wind_used_mwh = 0.0;
    double h2_exported_mwh = 0.0;         // annual, thermal
    double h2_export_elec_mwh = 0.0;      // annual electricity into exported H2
    bool converged = false;
    solver::Status status = solver::Status::Optimal;
};

// (nonsynchronous generation + imports) / (demand + exports)
double snsp(const HourDispatch& h, const ComInstance& inst);

// 1 - wind used / wind available (0 when no wind is available)
double curtailment_rate(const DispatchResult& r);

// exported electrolysis electricity times conversion efficiency, annualised
double export_potential(const DispatchResult& r, double efficiency);

struct ScpOptions {
    double tol = 1e-4;
    int max_iter = 30;
    long bnb_node_limit = 20000;
};

DispatchResult sequential_convex_solve(const ComInstance& inst, const ScpOptions& opts = {});

} // namespace h2::powergas
