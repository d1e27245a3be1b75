#pragma once
#include "h2/geo.hpp"
#include "h2/lcoh.hpp"
#include "h2/powergas.hpp"
#include "h2/trade.hpp"
#include "h2/wake.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

// End-to-end orchestration: wake -> lcoh -> dispatch -> trade, with file
// outputs per stage. All outputs are deterministic functions of
// (config, seed) and are written atomically (temp file, then rename).

namespace h2::pipeline {

struct WeibullParams {
    double shape = 2.0;
    double scale_ms = 10.0;
};

struct RunConfig {
    int year = 2030;
    lcoh::Scenario scenario = lcoh::Scenario::Median;
    double blend_cap = -1.0; // <0: derived from year (2030->0, 2040->0.2, 2050->1)
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    // input files (resolved relative to the config file's directory)
    std::string grid_csv;
    std::string zones_json;   // optional
    std::string ports_json;
    std::string costs_json;
    std::string turbine_csv;
    std::string system_json;  // dispatch stage
    std::string trade_json;   // trade stage

    // wake stage knobs
    int rep_rows = 3, rep_cols = 3;
    wake::FarmOptions farm;
    int synth_hours = 2000;
    double spacing_deficit_threshold = 0.05;
    double rotor_diameter_m = 240.0;
    double vessel_density_cap = 10.0; // normalisation cap, vessels/km^2/year
    std::map<std::string, WeibullParams> wind_by_country;

    // cost stack (parsed from costs_json)
    lcoh::CostModel costs;
    lcoh::ElectrolyserSpec electrolyser;
    lcoh::LearningTable learning;

    // trade defaults for countries without a dispatch run
    std::map<std::string, double> default_export_caps_twh;
    std::string dispatch_country = "IE";

    double effective_blend_cap() const;
    static RunConfig from_json_file(const std::string& path);
};

struct CellOutcome {
    geo::GridCell cell;
    double cf_mean = 0.0;
    std::vector<double> cf_series;
    double installable_mw = 0.0;
    double spacing_m = 0.0;
    int turbines = 0;
    lcoh::CellEvaluation eval;
};

struct WakeStage {
    std::vector<CellOutcome> cells; // excluded cells carry empty series
    double spacing_m = 0.0;
};

struct LcohStage {
    std::vector<lcoh::LcohResult> results;
    std::map<std::string, lcoh::SupplyCurve> capacity_curves; // GW axis
    std::map<std::string, lcoh::SupplyCurve> energy_curves;   // TWh axis
};

struct DispatchStage {
    powergas::DispatchResult result;
    double export_cap_twh = 0.0;
};

struct TradeStage {
    trade::TradeInstance instance;
    trade::TradePlan plan;
    trade::CarbonLedger ledger;
};

WakeStage run_wake(const RunConfig& cfg);
LcohStage run_lcoh(const RunConfig& cfg, const WakeStage& wake);
DispatchStage run_dispatch(const RunConfig& cfg);
TradeStage run_trade(const RunConfig& cfg, const LcohStage* lcoh_stage, const DispatchStage* dispatch);

// Stage commands with file outputs; each recomputes its upstream
// dependencies in-process so it can run standalone.
void cmd_wake(const RunConfig& cfg);
void cmd_lcoh(const RunConfig& cfg);
void cmd_dispatch(const RunConfig& cfg);
void cmd_trade(const RunConfig& cfg);
void cmd_pipeline(const RunConfig& cfg);

} // namespace h2::pipeline
