#include "h2/pipeline.hpp"
#include "h2/csv.hpp"
#include "h2/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace h2::pipeline {

namespace fs = std::filesystem;

double RunConfig::effective_blend_cap() const {
    if (blend_cap >= 0.0) return blend_cap;
    if (year >= 2050) return 1.0;
    if (year >= 2040) return 0.2;
    return 0.0;
}

namespace {

std::string resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return p;
    fs::path path(p);
    if (path.is_absolute()) return p;
    return (base / path).string();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

} // namespace

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    RunConfig cfg;
    const fs::path base = fs::path(path).parent_path();
    try {
        cfg.year = j.value("year", 2030);
        cfg.scenario = lcoh::scenario_from_string(j.value("scenario", std::string("median")));
        cfg.blend_cap = j.value("blend_cap", -1.0);
        cfg.seed = j.value("seed", 1ULL);
        cfg.out_dir = j.value("out_dir", std::string("out"));
        cfg.grid_csv = resolve(base, j.value("grid_csv", std::string()));
        cfg.zones_json = resolve(base, j.value("zones_json", std::string()));
        cfg.ports_json = resolve(base, j.value("ports_json", std::string()));
        cfg.costs_json = resolve(base, j.value("costs_json", std::string()));
        cfg.turbine_csv = resolve(base, j.value("turbine_csv", std::string()));
        cfg.system_json = resolve(base, j.value("system_json", std::string()));
        cfg.trade_json = resolve(base, j.value("trade_json", std::string()));
        cfg.rep_rows = j.value("rep_rows", 3);
        cfg.rep_cols = j.value("rep_cols", 3);
        cfg.synth_hours = j.value("synth_hours", 2000);
        cfg.spacing_deficit_threshold = j.value("spacing_deficit_threshold", 0.05);
        cfg.rotor_diameter_m = j.value("rotor_diameter_m", 240.0);
        cfg.vessel_density_cap = j.value("vessel_density_cap", 10.0);
        cfg.farm.decay_k = j.value("wake_decay_k", 0.05);
        cfg.farm.influence_cutoff = j.value("influence_cutoff", 1e-3);
        cfg.farm.direction_bin_deg = j.value("direction_bin_deg", 1.0);
        cfg.dispatch_country = j.value("dispatch_country", std::string("IE"));
        if (j.contains("wind_by_country"))
            for (const auto& [k, v] : j["wind_by_country"].items())
                cfg.wind_by_country[k] = {v.at("shape").get<double>(), v.at("scale_ms").get<double>()};
        if (j.contains("default_export_caps_twh"))
            for (const auto& [k, v] : j["default_export_caps_twh"].items())
                cfg.default_export_caps_twh[k] = v.get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }

    if (!cfg.costs_json.empty()) {
        std::ifstream cin_(cfg.costs_json);
        if (!cin_) throw InputError("cannot open costs file: " + cfg.costs_json);
        nlohmann::json c;
        try {
            cin_ >> c;
        } catch (const std::exception& e) {
            throw InputError(cfg.costs_json + ": " + e.what());
        }
        try {
            auto& cm = cfg.costs;
            cm.devex_eur_per_mw = c.value("devex_eur_per_mw", cm.devex_eur_per_mw);
            cm.turbine_eur_per_mw = c.value("turbine_eur_per_mw", cm.turbine_eur_per_mw);
            if (c.contains("foundation_eur_per_mw")) {
                cm.foundation_eur_per_mw[0] = c["foundation_eur_per_mw"].at("monopile").get<double>();
                cm.foundation_eur_per_mw[1] = c["foundation_eur_per_mw"].at("jacket").get<double>();
                cm.foundation_eur_per_mw[2] = c["foundation_eur_per_mw"].at("floating").get<double>();
            }
            cm.array_cable_eur_per_km = c.value("array_cable_eur_per_km", cm.array_cable_eur_per_km);
            cm.export_cable_eur_per_km = c.value("export_cable_eur_per_km", cm.export_cable_eur_per_km);
            cm.platform_eur_per_mw = c.value("platform_eur_per_mw", cm.platform_eur_per_mw);
            cm.opex_eur_per_mw_year = c.value("opex_eur_per_mw_year", cm.opex_eur_per_mw_year);
            cm.maintenance_eur_per_km_year =
                c.value("maintenance_eur_per_km_year", cm.maintenance_eur_per_km_year);
            cm.decex_eur_per_mw = c.value("decex_eur_per_mw", cm.decex_eur_per_mw);
            cm.discount_rate = c.value("discount_rate", cm.discount_rate);
            cm.lifetime_years = c.value("lifetime_years", cm.lifetime_years);
            auto& es = cfg.electrolyser;
            if (c.contains("electrolyser")) {
                const auto& e = c["electrolyser"];
                es.efficiency_2030 = e.value("efficiency_2030", es.efficiency_2030);
                es.efficiency_2050 = e.value("efficiency_2050", es.efficiency_2050);
                es.capex_eur_per_mw = e.value("capex_eur_per_mw", es.capex_eur_per_mw);
                es.opex_fraction_per_year = e.value("opex_fraction_per_year", es.opex_fraction_per_year);
                es.aux_margin = e.value("aux_margin", es.aux_margin);
                es.fixed_charge_rate = e.value("fixed_charge_rate", es.fixed_charge_rate);
                es.h2_value_eur_per_mwh = e.value("h2_value_eur_per_mwh", es.h2_value_eur_per_mwh);
            }
            if (c.contains("learning")) {
                const auto& l = c["learning"];
                cfg.learning.high_offset = l.value("high_offset", cfg.learning.high_offset);
                cfg.learning.low_offset = l.value("low_offset", cfg.learning.low_offset);
            }
        } catch (const nlohmann::json::exception& e) {
            throw InputError(cfg.costs_json + ": " + e.what());
        }
        cfg.costs.validate();
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// wake stage
// ---------------------------------------------------------------------------

WakeStage run_wake(const RunConfig& cfg) {
    if (cfg.grid_csv.empty()) throw InputError("config is missing grid_csv");
    if (cfg.ports_json.empty()) throw InputError("config is missing ports_json");
    if (cfg.turbine_csv.empty()) throw InputError("config is missing turbine_csv");
    auto cells = geo::load_grid(cfg.grid_csv);
    if (!cfg.zones_json.empty()) {
        auto zones = geo::load_zones(cfg.zones_json);
        geo::apply_exclusions(cells, zones);
    }
    const auto curve = wake::PowerCurve::from_csv(cfg.turbine_csv, cfg.rotor_diameter_m);
    WakeStage stage;
    stage.spacing_m = std::max(cfg.rotor_diameter_m,
                               wake::min_spacing(curve, cfg.farm.decay_k, cfg.spacing_deficit_threshold));
    const auto layout = wake::Layout::grid(cfg.rep_rows, cfg.rep_cols, stage.spacing_m);
    layout.validate(cfg.rotor_diameter_m);
    const double rated_farm = curve.rated_mw * layout.size();

    stage.cells.reserve(cells.size());
    for (const auto& cell : cells) {
        CellOutcome out;
        out.cell = cell;
        if (!cell.excluded) {
            WeibullParams wp;
            const auto it = cfg.wind_by_country.find(cell.country);
            if (it != cfg.wind_by_country.end()) wp = it->second;
            const std::uint64_t cell_seed =
                cfg.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(cell.id) * 0x2545f4914f6cdd1dULL;
            const auto series = geo::synth_wind(cell_seed, wp.shape, wp.scale_ms, cfg.synth_hours);
            const auto power = wake::farm_power(layout, curve, series, cfg.farm);
            out.cf_series.resize(power.size());
            for (std::size_t t = 0; t < power.size(); ++t) out.cf_series[t] = power[t] / rated_farm;
            out.cf_mean = wake::capacity_factor(power, rated_farm);
            const double cell_area_m2 = cell.area_km2 * 1e6;
            out.turbines = static_cast<int>(std::floor(cell_area_m2 / (stage.spacing_m * stage.spacing_m)));
            out.spacing_m = stage.spacing_m;
            const double base_mw = out.turbines * curve.rated_mw;
            const double density = cell.vessel_density / cfg.vessel_density_cap;
            out.installable_mw = lcoh::derate_density(base_mw, density);
        }
        stage.cells.push_back(std::move(out));
    }
    return stage;
}

// ---------------------------------------------------------------------------
// lcoh stage
// ---------------------------------------------------------------------------

LcohStage run_lcoh(const RunConfig& cfg, const WakeStage& wake_stage) {
    const auto ports = geo::load_ports(cfg.ports_json);
    if (ports.ports.empty() || ports.connection_points.empty())
        throw InputError(cfg.ports_json + ": ports and connection_points must be non-empty");
    LcohStage stage;
    std::map<std::string, std::vector<lcoh::LcohResult>> per_country;
    std::map<std::string, std::vector<std::pair<double, double>>> energy_entries; // (lcoh, twh)
    for (const auto& out : wake_stage.cells) {
        if (out.cell.excluded || out.installable_mw <= 0.0) continue;
        const geo::LatLon pos{out.cell.lat, out.cell.lon};
        const double dist_port = geo::nearest_km(pos, ports.ports);
        const double dist_conn = geo::nearest_km(pos, ports.connection_points);
        std::vector<double> wind_mw(out.cf_series.size());
        for (std::size_t t = 0; t < out.cf_series.size(); ++t)
            wind_mw[t] = out.cf_series[t] * out.installable_mw;
        const double array_km = out.turbines * out.spacing_m / 1000.0;
        const auto eval = lcoh::evaluate_cell(wind_mw, out.installable_mw, out.cell.depth_m, dist_port,
                                              dist_conn, array_km, cfg.costs, cfg.electrolyser, cfg.year);
        if (!eval.producing) continue;
        lcoh::LcohResult res;
        res.cell_id = out.cell.id;
        res.lat = out.cell.lat;
        res.lon = out.cell.lon;
        res.country = out.cell.country;
        res.foundation = eval.foundation;
        res.lcoh_eur_mwh = eval.lcoh_eur_mwh;
        res.annual_h2_mwh = eval.annual_h2_mwh;
        res.installable_mw = out.installable_mw;
        stage.results.push_back(res);
        per_country[res.country].push_back(res);
        const double adj =
            lcoh::apply_learning(res.lcoh_eur_mwh, cfg.year, res.foundation, cfg.scenario, cfg.learning);
        energy_entries[res.country].push_back({adj, res.annual_h2_mwh / 1e6});
    }
    for (auto& [country, results] : per_country)
        stage.capacity_curves[country] =
            lcoh::supply_curve(results, country, cfg.year, cfg.scenario, cfg.learning);
    for (auto& [country, entries] : energy_entries) {
        std::sort(entries.begin(), entries.end());
        lcoh::SupplyCurve curve;
        curve.country = country;
        curve.year = cfg.year;
        curve.scenario = cfg.scenario;
        double cum = 0.0;
        for (const auto& [adj, twh] : entries) {
            cum += twh;
            curve.breakpoints.push_back({cum, adj});
        }
        stage.energy_curves[country] = std::move(curve);
    }
    return stage;
}

// ---------------------------------------------------------------------------
// dispatch stage
// ---------------------------------------------------------------------------

DispatchStage run_dispatch(const RunConfig& cfg) {
    if (cfg.system_json.empty()) throw InputError("config is missing system_json");
    auto inst = powergas::ComInstance::from_json_file(cfg.system_json);
    inst.blend_cap = cfg.effective_blend_cap();
    inst.security.h2_fraction_cap = std::max(inst.security.h2_fraction_cap, inst.blend_cap);
    DispatchStage stage;
    stage.result = powergas::sequential_convex_solve(inst);
    stage.export_cap_twh = stage.result.h2_exported_mwh / 1e6;
    return stage;
}

// ---------------------------------------------------------------------------
// trade stage
// ---------------------------------------------------------------------------

TradeStage run_trade(const RunConfig& cfg, const LcohStage* lcoh_stage, const DispatchStage* dispatch) {
    if (cfg.trade_json.empty()) throw InputError("config is missing trade_json");
    auto inst = trade::TradeInstance::from_json_file(cfg.trade_json);
    inst.year = cfg.year;
    if (lcoh_stage) {
        // supply curves from the lcoh stage override any placeholders
        for (const auto& [country, curve] : lcoh_stage->energy_curves) {
            bool found = false;
            for (auto& s : inst.supplies) {
                if (s.country != country) continue;
                s.curve = curve;
                found = true;
            }
            if (!found) {
                trade::CountrySupply cs;
                cs.country = country;
                cs.year = cfg.year;
                cs.curve = curve;
                const auto it = cfg.default_export_caps_twh.find(country);
                cs.export_cap_twh = it != cfg.default_export_caps_twh.end()
                                        ? it->second
                                        : curve.breakpoints.back().first;
                inst.supplies.push_back(std::move(cs));
            }
        }
    }
    if (dispatch) {
        for (auto& s : inst.supplies)
            if (s.country == cfg.dispatch_country)
                s.export_cap_twh = std::min(s.export_cap_twh, std::max(0.0, dispatch->export_cap_twh));
    }
    // clamp caps to the curve totals
    for (auto& s : inst.supplies)
        if (!s.curve.breakpoints.empty())
            s.export_cap_twh = std::min(s.export_cap_twh, s.curve.breakpoints.back().first);
    TradeStage stage;
    stage.instance = inst;
    stage.plan = trade::solve_trade(inst);
    if (stage.plan.status == solver::Status::Optimal)
        stage.ledger = trade::carbon_reduction(stage.plan, inst.carbon_factor_t_per_mwh, inst.backstop_green);
    return stage;
}

// ---------------------------------------------------------------------------
// commands with file outputs
// ---------------------------------------------------------------------------

namespace {

void write_wake_csv(const RunConfig& cfg, const WakeStage& stage) {
    std::ostringstream os;
    os << "cell_id,lat,lon,country,cf,installable_mw\n";
    for (const auto& c : stage.cells) {
        if (c.cell.excluded) continue;
        os << c.cell.id << ',' << fmt(c.cell.lat) << ',' << fmt(c.cell.lon) << ',' << c.cell.country
           << ',' << fmt(c.cf_mean) << ',' << fmt(c.installable_mw) << '\n';
    }
    csv::write_file_atomic(cfg.out_dir + "/wake_cf.csv", os.str());
}

void write_lcoh_outputs(const RunConfig& cfg, const LcohStage& stage) {
    std::ostringstream os;
    os << "cell_id,lat,lon,foundation,lcoh,installable_mw\n";
    for (const auto& r : stage.results) {
        os << r.cell_id << ',' << fmt(r.lat) << ',' << fmt(r.lon) << ','
           << lcoh::foundation_name(r.foundation) << ',' << fmt(r.lcoh_eur_mwh) << ','
           << fmt(r.installable_mw) << '\n';
    }
    csv::write_file_atomic(cfg.out_dir + "/lcoh_map.csv", os.str());
    for (const auto& [country, curve] : stage.capacity_curves) {
        std::ostringstream cs;
        cs << "cum_gw,lcoh\n";
        for (const auto& [gw, l] : curve.breakpoints) cs << fmt(gw) << ',' << fmt(l) << '\n';
        csv::write_file_atomic(cfg.out_dir + "/supply_" + country + ".csv", cs.str());
    }
    nlohmann::json supplies = nlohmann::json::object();
    for (const auto& [country, curve] : stage.energy_curves) {
        nlohmann::json bps = nlohmann::json::array();
        for (const auto& [twh, l] : curve.breakpoints) bps.push_back({twh, l});
        supplies[country] = bps;
    }
    csv::write_file_atomic(cfg.out_dir + "/trade_supplies.json", supplies.dump(2) + "\n");
}

void write_dispatch_outputs(const RunConfig& cfg, const DispatchStage& stage) {
    std::ostringstream os;
    os << "day,hour,demand_mw,wind_avail_mw,wind_used_mw,elec_mw,import_mw,export_mw,"
          "h2_export_mwth,max_blend\n";
    for (const auto& d : stage.result.days) {
        for (std::size_t t = 0; t < d.hours.size(); ++t) {
            const auto& h = d.hours[t];
            double maxy = 0.0;
            for (double y : h.h2_fraction) maxy = std::max(maxy, y);
            os << d.day_name << ',' << t << ',' << fmt(h.demand_mw) << ',' << fmt(h.wind_avail_mw)
               << ',' << fmt(h.wind_used_mw) << ',' << fmt(h.elec_mw) << ',' << fmt(h.import_mw) << ','
               << fmt(h.export_mw) << ',' << fmt(h.h2_export_mwth) << ',' << fmt(maxy) << '\n';
        }
    }
    csv::write_file_atomic(cfg.out_dir + "/dispatch_hours.csv", os.str());

    nlohmann::json summary;
    summary["status"] = solver::status_name(stage.result.status);
    summary["converged"] = stage.result.converged;
    summary["total_cost_eur"] = stage.result.total_cost_eur;
    summary["curtailment_rate"] = powergas::curtailment_rate(stage.result);
    summary["wind_available_mwh"] = stage.result.wind_available_mwh;
    summary["wind_used_mwh"] = stage.result.wind_used_mwh;
    summary["h2_exported_mwh"] = stage.result.h2_exported_mwh;
    summary["export_cap_twh"] = stage.export_cap_twh;
    csv::write_file_atomic(cfg.out_dir + "/dispatch_summary.json", summary.dump(2) + "\n");

    nlohmann::json caps;
    caps[cfg.dispatch_country] = stage.export_cap_twh;
    csv::write_file_atomic(cfg.out_dir + "/export_caps.json", caps.dump(2) + "\n");
}

void write_trade_outputs(const RunConfig& cfg, const TradeStage& stage) {
    std::ostringstream os;
    os << "from,to,twh\n";
    for (const auto& [from, to, twh] : stage.plan.flows)
        os << from << ',' << to << ',' << fmt(twh) << '\n';
    csv::write_file_atomic(cfg.out_dir + "/trade_flows.csv", os.str());

    std::ostringstream ledger;
    ledger << "importer,exporter,mt_co2\n";
    for (const auto& [imp, contributions] : stage.ledger.attribution)
        for (const auto& [exp, mt] : contributions) ledger << imp << ',' << exp << ',' << fmt(mt) << '\n';
    csv::write_file_atomic(cfg.out_dir + "/carbon_ledger.csv", ledger.str());

    // Sankey structure {nodes, links} for external plotting
    nlohmann::json sankey;
    std::vector<std::string> nodes;
    auto node_id = [&](const std::string& name) {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i] == name) return static_cast<int>(i);
        nodes.push_back(name);
        return static_cast<int>(nodes.size() - 1);
    };
    nlohmann::json links = nlohmann::json::array();
    for (const auto& [from, to, twh] : stage.plan.flows) {
        nlohmann::json link;
        link["source"] = node_id(from);
        link["target"] = node_id(to);
        link["value"] = twh;
        links.push_back(link);
    }
    nlohmann::json jnodes = nlohmann::json::array();
    for (const auto& n : nodes) jnodes.push_back(nlohmann::json{{"name", n}});
    sankey["nodes"] = jnodes;
    sankey["links"] = links;
    sankey["objective_meur"] = stage.plan.objective_meur;
    sankey["status"] = solver::status_name(stage.plan.status);
    csv::write_file_atomic(cfg.out_dir + "/sankey.json", sankey.dump(2) + "\n");
}

} // namespace

void cmd_wake(const RunConfig& cfg) {
    write_wake_csv(cfg, run_wake(cfg));
}

void cmd_lcoh(const RunConfig& cfg) {
    const auto wake_stage = run_wake(cfg);
    const auto stage = run_lcoh(cfg, wake_stage);
    write_wake_csv(cfg, wake_stage);
    write_lcoh_outputs(cfg, stage);
    if (stage.results.empty())
        std::fprintf(stderr, "warning: no producing cells remain after exclusions; LCOH map is empty\n");
}

void cmd_dispatch(const RunConfig& cfg) {
    const auto stage = run_dispatch(cfg);
    write_dispatch_outputs(cfg, stage);
    if (stage.result.status != solver::Status::Optimal || !stage.result.converged)
        throw ModelOutcomeError("dispatch did not reach a converged optimum (status " +
                                std::string(solver::status_name(stage.result.status)) + ")");
}

void cmd_trade(const RunConfig& cfg) {
    const auto wake_stage = run_wake(cfg);
    const auto lcoh_stage = run_lcoh(cfg, wake_stage);
    const auto dispatch = run_dispatch(cfg);
    const auto stage = run_trade(cfg, &lcoh_stage, &dispatch);
    write_trade_outputs(cfg, stage);
    if (stage.plan.status != solver::Status::Optimal)
        throw ModelOutcomeError("trade model finished with status " +
                                std::string(solver::status_name(stage.plan.status)));
}

void cmd_pipeline(const RunConfig& cfg) {
    const auto wake_stage = run_wake(cfg);
    write_wake_csv(cfg, wake_stage);
    const auto lcoh_stage = run_lcoh(cfg, wake_stage);
    write_lcoh_outputs(cfg, lcoh_stage);
    const auto dispatch = run_dispatch(cfg);
    write_dispatch_outputs(cfg, dispatch);
    const auto trade_stage = run_trade(cfg, &lcoh_stage, &dispatch);
    write_trade_outputs(cfg, trade_stage);
    if (dispatch.result.status != solver::Status::Optimal || !dispatch.result.converged)
        throw ModelOutcomeError("dispatch stage did not converge");
    if (trade_stage.plan.status != solver::Status::Optimal)
        throw ModelOutcomeError("trade stage finished with status " +
                                std::string(solver::status_name(trade_stage.plan.status)));
}

} // namespace h2::pipeline
