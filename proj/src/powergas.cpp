#include "h2/powergas.hpp"
#include "h2/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <numeric>

namespace h2::powergas {

using solver::kInf;
using solver::Row;
using solver::Sense;

GenType gen_type_from_string(const std::string& s) {
    if (s == "coal") return GenType::Coal;
    if (s == "peat") return GenType::Peat;
    if (s == "oil") return GenType::Oil;
    if (s == "gas") return GenType::Gas;
    if (s == "waste") return GenType::Waste;
    if (s == "hydro") return GenType::Hydro;
    if (s == "onshore_wind") return GenType::OnshoreWind;
    if (s == "solar") return GenType::Solar;
    if (s == "offshore_wind") return GenType::OffshoreWind;
    if (s == "interconnector") return GenType::Interconnector;
    throw InputError("unknown generator type: " + s);
}

const char* gen_type_name(GenType t) {
    switch (t) {
        case GenType::Coal: return "coal";
        case GenType::Peat: return "peat";
        case GenType::Oil: return "oil";
        case GenType::Gas: return "gas";
        case GenType::Waste: return "waste";
        case GenType::Hydro: return "hydro";
        case GenType::OnshoreWind: return "onshore_wind";
        case GenType::Solar: return "solar";
        case GenType::OffshoreWind: return "offshore_wind";
        case GenType::Interconnector: return "interconnector";
    }
    return "?";
}

bool is_wind(GenType t) {
    return t == GenType::OnshoreWind || t == GenType::OffshoreWind;
}

static bool is_variable_renewable(GenType t) {
    return is_wind(t) || t == GenType::Solar;
}

double Generator::fuel_at(double p_mw) const {
    double rest = p_mw, fuel = 0.0;
    for (const auto& s : segments) {
        const double take = std::min(rest, s.width_mw);
        fuel += take * s.heat_mwh_th_per_mwh;
        rest -= take;
        if (rest <= 0.0) break;
    }
    return fuel;
}

double Generator::cost_at(double p_mw) const {
    double rest = p_mw, cost = 0.0;
    for (const auto& s : segments) {
        const double take = std::min(rest, s.width_mw);
        cost += take * s.cost_eur_per_mwh;
        rest -= take;
        if (rest <= 0.0) break;
    }
    return cost;
}

int Day::hours() const {
    return demand_mw.empty() ? 0 : static_cast<int>(demand_mw.front().size());
}

void ComInstance::validate() const {
    const int nb = static_cast<int>(buses.size());
    for (const auto& l : lines) {
        if (l.from < 0 || l.from >= nb || l.to < 0 || l.to >= nb || l.from == l.to)
            throw ValidationError("line endpoints out of range");
        if (l.reactance_pu <= 0.0) throw ValidationError("line reactance must be positive");
    }
    for (const auto& g : gens) {
        if (g.bus < 0 || g.bus >= nb) throw ValidationError("generator bus out of range: " + g.name);
        if (g.pmin_mw > g.pmax_mw) throw ValidationError("generator pmin > pmax: " + g.name);
        if (g.type == GenType::Gas && g.gas_node >= static_cast<int>(gas_nodes.size()))
            throw ValidationError("generator gas node out of range: " + g.name);
        double width = 0.0;
        for (const auto& s : g.segments) width += s.width_mw;
        if (!g.segments.empty() && width + 1e-6 < g.pmax_mw)
            throw ValidationError("generator cost segments cover less than pmax: " + g.name);
    }
    const int nn = static_cast<int>(gas_nodes.size());
    for (const auto& p : pipes) {
        if (p.from < 0 || p.from >= nn || p.to < 0 || p.to >= nn || p.from == p.to)
            throw ValidationError("pipeline endpoints out of range");
        if (p.weymouth_k <= 0.0) throw ValidationError("pipeline Weymouth constant must be positive");
    }
    for (const auto& n : gas_nodes) {
        if (n.pressure_min_bar <= 0.0 || n.pressure_min_bar >= n.pressure_max_bar)
            throw ValidationError("gas node pressure bounds must be positive and ordered: " + n.name);
    }
    for (const auto& e : electrolysers) {
        if (e.bus < 0 || e.bus >= nb) throw ValidationError("electrolyser bus out of range: " + e.name);
        if (e.gas_node >= nn) throw ValidationError("electrolyser gas node out of range: " + e.name);
        if (e.efficiency <= 0.0 || e.efficiency >= 1.0)
            throw ValidationError("electrolyser efficiency must lie in (0,1): " + e.name);
    }
    for (const auto& d : days) {
        if (static_cast<int>(d.demand_mw.size()) != nb)
            throw ValidationError("day " + d.name + ": demand series count != bus count");
        const int T = d.hours();
        if (T < 1) throw ValidationError("day " + d.name + ": empty horizon");
        for (const auto& s : d.demand_mw)
            if (static_cast<int>(s.size()) != T)
                throw ValidationError("day " + d.name + ": ragged demand series");
        if (static_cast<int>(d.wind_cf.size()) != static_cast<int>(gens.size()))
            throw ValidationError("day " + d.name + ": wind_cf series count != generator count");
        for (const auto& s : d.wind_cf)
            if (static_cast<int>(s.size()) != T)
                throw ValidationError("day " + d.name + ": ragged wind_cf series");
        if (static_cast<int>(d.gas_demand_mwth.size()) != nn)
            throw ValidationError("day " + d.name + ": gas demand series count != gas node count");
        for (const auto& s : d.gas_demand_mwth)
            if (static_cast<int>(s.size()) != T)
                throw ValidationError("day " + d.name + ": ragged gas demand series");
    }
    // any bus carrying demand or generation must be connected to bus 0
    if (nb > 1) {
        std::vector<int> parent(nb);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
        for (const auto& l : lines) parent[find(l.from)] = find(l.to);
        for (int b = 0; b < nb; ++b) {
            bool active = false;
            for (const auto& g : gens)
                if (g.bus == b) active = true;
            for (const auto& d : days)
                for (int t = 0; t < d.hours(); ++t)
                    if (d.demand_mw[b][t] > 0.0) active = true;
            for (const auto& e : electrolysers)
                if (e.bus == b) active = true;
            if (active && find(b) != find(0))
                throw ValidationError("bus " + buses[b] + " carries demand or generation but is disconnected");
        }
    }
}

double ComInstance::effective_h2_cap() const {
    double cap = std::min(blend_cap, security.h2_fraction_cap);
    if (cap <= 0.0) return 0.0;
    // shrink to the security region's admissible fraction when it binds earlier
    if (!gas::check_security(gas::GasComposition::blend(0.0), security, constants).pass)
        return cap; // region not centred on the base gas; leave the cap alone
    double lo = 0.0, hi = cap;
    if (gas::check_security(gas::GasComposition::blend(cap), security, constants).pass) return cap;
    for (int i = 0; i < 50; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (gas::check_security(gas::GasComposition::blend(mid), security, constants).pass) lo = mid;
        else hi = mid;
    }
    return lo;
}

// ---------------------------------------------------------------------------
// JSON loading
// ---------------------------------------------------------------------------

ComInstance ComInstance::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open system file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    ComInstance inst;
    try {
        for (const auto& b : j.at("buses")) inst.buses.push_back(b.get<std::string>());
        auto bus_index = [&](const std::string& name) {
            for (std::size_t i = 0; i < inst.buses.size(); ++i)
                if (inst.buses[i] == name) return static_cast<int>(i);
            throw InputError(path + ": unknown bus '" + name + "'");
        };
        for (const auto& l : j.value("lines", nlohmann::json::array())) {
            Line ln;
            ln.from = bus_index(l.at("from").get<std::string>());
            ln.to = bus_index(l.at("to").get<std::string>());
            ln.reactance_pu = l.at("reactance").get<double>();
            ln.rating_mw = l.at("rating_mw").get<double>();
            ln.summer_mult = l.value("summer_mult", 1.0);
            ln.winter_mult = l.value("winter_mult", 1.0);
            inst.lines.push_back(ln);
        }
        std::vector<std::string> gnode_names;
        for (const auto& n : j.value("gas_nodes", nlohmann::json::array())) {
            GasNode gn;
            gn.name = n.at("name").get<std::string>();
            gn.supply_cap_kvol_h = n.value("supply_cap_kvol_h", 0.0);
            gn.supply_cost_eur_per_mwh_th = n.value("supply_cost_eur_per_mwh", 0.0);
            gn.pressure_min_bar = n.value("pressure_min_bar", 20.0);
            gn.pressure_max_bar = n.value("pressure_max_bar", 80.0);
            gn.linepack_kvol = n.value("linepack_kvol", 0.0);
            gn.linepack_rate_kvol_h = n.value("linepack_rate_kvol_h", 0.0);
            gnode_names.push_back(gn.name);
            inst.gas_nodes.push_back(gn);
        }
        auto gnode_index = [&](const std::string& name) {
            for (std::size_t i = 0; i < gnode_names.size(); ++i)
                if (gnode_names[i] == name) return static_cast<int>(i);
            throw InputError(path + ": unknown gas node '" + name + "'");
        };
        for (const auto& p : j.value("pipelines", nlohmann::json::array())) {
            Pipeline pl;
            pl.from = gnode_index(p.at("from").get<std::string>());
            pl.to = gnode_index(p.at("to").get<std::string>());
            pl.weymouth_k = p.at("weymouth_k").get<double>();
            pl.cap_kvol_h = p.at("cap_kvol_h").get<double>();
            inst.pipes.push_back(pl);
        }
        for (const auto& g : j.at("generators")) {
            Generator gen;
            gen.name = g.at("name").get<std::string>();
            gen.bus = bus_index(g.at("bus").get<std::string>());
            gen.type = gen_type_from_string(g.at("type").get<std::string>());
            gen.pmax_mw = g.at("pmax_mw").get<double>();
            gen.pmin_mw = g.value("pmin_mw", 0.0);
            gen.ramp_mw_per_h = g.value("ramp_mw_per_h", 1e9);
            gen.min_up_h = g.value("min_up_h", 1);
            gen.min_down_h = g.value("min_down_h", 1);
            gen.start_cost_eur = g.value("start_cost_eur", 0.0);
            gen.no_load_cost_eur_per_h = g.value("no_load_cost_eur_per_h", 0.0);
            gen.inertia_mws = g.value("inertia_mws", 0.0);
            gen.must_run = g.value("must_run", false);
            gen.synchronous = g.value("synchronous", !is_variable_renewable(gen.type) &&
                                                         gen.type != GenType::Interconnector);
            gen.committable = g.value("committable", !is_variable_renewable(gen.type) &&
                                                         gen.type != GenType::Interconnector &&
                                                         gen.type != GenType::Hydro);
            gen.init_on = g.value("init_on", gen.must_run);
            gen.init_hours = g.value("init_hours", 100);
            gen.init_p_mw = g.value("init_p_mw", gen.init_on ? gen.pmin_mw : 0.0);
            if (g.contains("gas_node")) gen.gas_node = gnode_index(g["gas_node"].get<std::string>());
            if (g.contains("segments")) {
                for (const auto& s : g["segments"])
                    gen.segments.push_back({s.at("width_mw").get<double>(),
                                            s.value("cost_eur_per_mwh", 0.0),
                                            s.value("heat_mwh_th_per_mwh", 0.0)});
            } else {
                gen.segments.push_back({gen.pmax_mw, g.value("cost_eur_per_mwh", 0.0),
                                        g.value("heat_mwh_th_per_mwh", 0.0)});
            }
            inst.gens.push_back(gen);
        }
        for (const auto& e : j.value("electrolysers", nlohmann::json::array())) {
            Electrolyser el;
            el.name = e.at("name").get<std::string>();
            el.bus = bus_index(e.at("bus").get<std::string>());
            el.cap_mw = e.at("cap_mw").get<double>();
            el.efficiency = e.value("efficiency", 0.79);
            if (e.contains("gas_node")) el.gas_node = gnode_index(e["gas_node"].get<std::string>());
            inst.electrolysers.push_back(el);
        }
        if (j.contains("policy")) {
            const auto& p = j["policy"];
            inst.policy.snsp_cap = p.value("snsp_cap", 0.75);
            inst.policy.min_synchronous_units = p.value("min_synchronous_units", 0);
            inst.policy.min_inertia_mws = p.value("min_inertia_mws", 0.0);
            inst.policy.reserve_wind_fraction = p.value("reserve_wind_fraction", 0.1);
            inst.policy.import_cost_eur_per_mwh = p.value("import_cost_eur_per_mwh", 80.0);
            inst.policy.export_price_eur_per_mwh = p.value("export_price_eur_per_mwh", 40.0);
        }
        if (j.contains("security")) {
            const auto& s = j["security"];
            inst.security.wobbe_min = s.at("wobbe_min").get<double>();
            inst.security.wobbe_max = s.at("wobbe_max").get<double>();
            inst.security.density_min = s.at("density_min").get<double>();
            inst.security.density_max = s.at("density_max").get<double>();
            inst.security.weaver_min = s.at("weaver_min").get<double>();
            inst.security.weaver_max = s.at("weaver_max").get<double>();
            inst.security.h2_fraction_cap = s.value("h2_fraction_cap", 1.0);
        } else {
            inst.security = {0.0, 1e9, 0.0, 1e9, 0.0, 1e9, 1.0};
        }
        inst.blend_cap = j.value("blend_cap", 0.0);
        inst.allow_export = j.value("allow_export", false);
        inst.h2_export_value_eur_per_mwh = j.value("h2_export_value_eur_per_mwh", 10.0);
        inst.curtailment_penalty_eur_per_mwh = j.value("curtailment_penalty_eur_per_mwh", 0.1);
        inst.pressure_penalty = j.value("pressure_penalty", 1e-4);
        inst.scp_slack_penalty = j.value("scp_slack_penalty", 1e3);
        for (const auto& d : j.at("days")) {
            Day day;
            day.name = d.at("name").get<std::string>();
            day.season = d.value("season", std::string("summer")) == "winter" ? Season::Winter
                                                                              : Season::Summer;
            day.weight_days = d.value("weight_days", 91.25);
            for (const auto& s : d.at("demand_mw")) day.demand_mw.push_back(s.get<std::vector<double>>());
            if (d.contains("wind_cf"))
                for (const auto& s : d["wind_cf"]) day.wind_cf.push_back(s.get<std::vector<double>>());
            for (const auto& s : d.value("gas_demand_mwth", nlohmann::json::array()))
                day.gas_demand_mwth.push_back(s.get<std::vector<double>>());
            // default series when omitted
            const int T = day.hours();
            while (day.wind_cf.size() < inst.gens.size())
                day.wind_cf.push_back(std::vector<double>(T, 1.0));
            while (day.gas_demand_mwth.size() < inst.gas_nodes.size())
                day.gas_demand_mwth.push_back(std::vector<double>(T, 0.0));
            inst.days.push_back(std::move(day));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    inst.validate();
    return inst;
}

// ---------------------------------------------------------------------------
// Model build
// ---------------------------------------------------------------------------

namespace {

struct Dims {
    int T = 0, nb = 0, ng = 0, nl = 0, nn = 0, np = 0, ne = 0;
};

std::vector<std::vector<int>> grid_vars(solver::LinearProgram& lp, int n, int T, double lo, double hi,
                                        double obj = 0.0) {
    std::vector<std::vector<int>> v(n, std::vector<int>(T, -1));
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < T; ++t) v[i][t] = lp.add_var(lo, hi, obj);
    return v;
}

} // namespace

UcModel build_uc(const ComInstance& inst, const Day& day, const ScpState* scp,
                 const std::vector<std::vector<int>>* fixed_commit) {
    inst.validate();
    Dims d;
    d.T = day.hours();
    d.nb = static_cast<int>(inst.buses.size());
    d.ng = static_cast<int>(inst.gens.size());
    d.nl = static_cast<int>(inst.lines.size());
    d.nn = static_cast<int>(inst.gas_nodes.size());
    d.np = static_cast<int>(inst.pipes.size());
    d.ne = static_cast<int>(inst.electrolysers.size());
    const int T = d.T;

    const double hhv_ch4 = inst.constants.ch4.hhv_mj_m3 / 3.6; // MWh per kVol
    const double hhv_h2 = inst.constants.h2.hhv_mj_m3 / 3.6;
    const double ycap = inst.effective_h2_cap();
    const bool blending = ycap > 0.0; // zero cap drops the whole mixing apparatus

    UcModel m;
    solver::LinearProgram& lp = m.milp.lp;
    VarMap& V = m.vars;
    V.T = T;

    // --- power-side variables
    V.u.assign(d.ng, {});
    V.start.assign(d.ng, {});
    V.shut.assign(d.ng, {});
    V.p.assign(d.ng, {});
    V.pseg.assign(d.ng, {});
    V.imp.assign(d.ng, {});
    V.exp.assign(d.ng, {});
    for (int g = 0; g < d.ng; ++g) {
        const Generator& gen = inst.gens[g];
        if (gen.committable) {
            V.u[g] = std::vector<int>(T);
            V.start[g] = std::vector<int>(T);
            V.shut[g] = std::vector<int>(T);
            for (int t = 0; t < T; ++t) {
                double ulo = gen.must_run ? 1.0 : 0.0, uhi = 1.0;
                if (fixed_commit) ulo = uhi = (*fixed_commit)[g][t];
                V.u[g][t] = lp.add_var(ulo, uhi, gen.no_load_cost_eur_per_h);
                V.start[g][t] = lp.add_var(0.0, 1.0, gen.start_cost_eur);
                V.shut[g][t] = lp.add_var(0.0, 1.0, 0.0);
            }
        }
        V.p[g] = std::vector<int>(T);
        if (gen.type == GenType::Interconnector) {
            V.imp[g] = std::vector<int>(T);
            V.exp[g] = std::vector<int>(T);
            for (int t = 0; t < T; ++t) {
                V.imp[g][t] = lp.add_var(0.0, std::max(0.0, gen.pmax_mw),
                                         inst.policy.import_cost_eur_per_mwh);
                V.exp[g][t] = lp.add_var(0.0, std::max(0.0, -gen.pmin_mw),
                                         -inst.policy.export_price_eur_per_mwh);
                V.p[g][t] = lp.add_var(-kInf, kInf, 0.0);
                lp.add_row({{V.p[g][t], 1.0}, {V.imp[g][t], -1.0}, {V.exp[g][t], 1.0}}, Sense::EQ, 0.0);
            }
        } else {
            std::vector<CostSegment> segs = gen.segments;
            if (segs.empty()) segs.push_back({gen.pmax_mw, 0.0, 0.0});
            V.pseg[g].resize(segs.size());
            for (std::size_t s = 0; s < segs.size(); ++s) V.pseg[g][s].resize(T);
            for (int t = 0; t < T; ++t) {
                double hi = gen.pmax_mw;
                if (is_variable_renewable(gen.type)) hi = gen.pmax_mw * day.wind_cf[g][t];
                V.p[g][t] = lp.add_var(0.0, hi, 0.0);
                Row sum;
                sum.coeffs.push_back({V.p[g][t], 1.0});
                for (std::size_t s = 0; s < segs.size(); ++s) {
                    const double c = segs[s].cost_eur_per_mwh -
                                     (is_wind(gen.type) ? inst.curtailment_penalty_eur_per_mwh : 0.0);
                    V.pseg[g][s][t] = lp.add_var(0.0, segs[s].width_mw, c);
                    sum.coeffs.push_back({V.pseg[g][s][t], -1.0});
                }
                sum.sense = Sense::EQ;
                sum.rhs = 0.0;
                lp.add_row(std::move(sum));
            }
        }
    }

    V.theta = grid_vars(lp, d.nb, T, -20.0, 20.0);
    V.lflow.assign(d.nl, {});
    for (int l = 0; l < d.nl; ++l) {
        const Line& ln = inst.lines[l];
        const double mult = day.season == Season::Summer ? ln.summer_mult : ln.winter_mult;
        const double cap = ln.rating_mw * mult;
        V.lflow[l] = std::vector<int>(T);
        for (int t = 0; t < T; ++t) V.lflow[l][t] = lp.add_var(-cap, cap, 0.0);
    }

    V.elec.assign(d.ne, {});
    V.inj_mwth.assign(d.ne, {});
    V.export_h2.assign(d.ne, {});
    for (int e = 0; e < d.ne; ++e) {
        const Electrolyser& el = inst.electrolysers[e];
        V.elec[e] = std::vector<int>(T);
        V.inj_mwth[e] = std::vector<int>(T);
        V.export_h2[e] = std::vector<int>(T);
        for (int t = 0; t < T; ++t) {
            V.elec[e][t] = lp.add_var(0.0, el.cap_mw, 0.0);
            V.inj_mwth[e][t] =
                lp.add_var(0.0, (el.gas_node >= 0 && blending) ? el.cap_mw : 0.0, 0.0);
            V.export_h2[e][t] =
                lp.add_var(0.0, inst.allow_export ? el.cap_mw : 0.0, -inst.h2_export_value_eur_per_mwh);
            // eta * elec = inject + export
            lp.add_row({{V.elec[e][t], el.efficiency},
                        {V.inj_mwth[e][t], -1.0},
                        {V.export_h2[e][t], -1.0}},
                       Sense::EQ, 0.0);
        }
    }

    V.reserve.resize(T);
    for (int t = 0; t < T; ++t) V.reserve[t] = lp.add_var(0.0, kInf, 0.0);

    // --- gas-side variables
    V.dvol = grid_vars(lp, d.nn, T, 0.0, kInf);
    V.supply.assign(d.nn, {});
    V.pi.assign(d.nn, {});
    V.y.assign(d.nn, {});
    V.wdem.assign(d.nn, {});
    V.lpk.assign(d.nn, {});
    V.wlpk.assign(d.nn, {});
    for (int n = 0; n < d.nn; ++n) {
        const GasNode& gn = inst.gas_nodes[n];
        V.supply[n].resize(T);
        V.pi[n].resize(T);
        V.y[n].resize(T);
        V.wdem[n].resize(T);
        V.lpk[n].resize(T);
        V.wlpk[n].resize(T);
        for (int t = 0; t < T; ++t) {
            V.supply[n][t] = lp.add_var(0.0, gn.supply_cap_kvol_h,
                                        gn.supply_cost_eur_per_mwh_th * hhv_ch4);
            V.pi[n][t] = lp.add_var(gn.pressure_min_bar * gn.pressure_min_bar,
                                    gn.pressure_max_bar * gn.pressure_max_bar, inst.pressure_penalty);
            const double rate = std::min(gn.linepack_rate_kvol_h, gn.linepack_kvol);
            V.lpk[n][t] = lp.add_var(-rate, rate, 0.0);
            if (blending) {
                V.y[n][t] = lp.add_var(0.0, ycap, 0.0);
                V.wdem[n][t] = lp.add_var(0.0, kInf, 0.0);
                V.wlpk[n][t] = lp.add_var(rate > 0.0 ? -rate : 0.0, rate > 0.0 ? rate : 0.0, 0.0);
            } else {
                V.y[n][t] = -1;
                V.wdem[n][t] = -1;
                V.wlpk[n][t] = -1;
            }
        }
    }
    V.fpipe.assign(d.np, {});
    V.wpipe.assign(d.np, {});
    V.wey_slack.assign(d.np, {});
    for (int p = 0; p < d.np; ++p) {
        const Pipeline& pl = inst.pipes[p];
        V.fpipe[p].resize(T);
        V.wpipe[p].resize(T);
        V.wey_slack[p].resize(T);
        for (int t = 0; t < T; ++t) {
            double lo = -pl.cap_kvol_h, hi = pl.cap_kvol_h;
            if (scp) {
                if (scp->flow_sign[p][t] >= 0) lo = 0.0;
                else hi = 0.0;
            }
            V.fpipe[p][t] = lp.add_var(lo, hi, 0.0);
            V.wpipe[p][t] = blending ? lp.add_var(-pl.cap_kvol_h, pl.cap_kvol_h, 0.0) : -1;
            V.wey_slack[p][t] = lp.add_var(0.0, scp ? kInf : 0.0, scp ? inst.scp_slack_penalty : 0.0);
        }
    }

    m.milp.integer.assign(lp.num_vars(), false);
    if (!fixed_commit)
        for (int g = 0; g < d.ng; ++g)
            if (inst.gens[g].committable)
                for (int t = 0; t < T; ++t) m.milp.integer[V.u[g][t]] = true;

    // --- power-side constraints
    for (int t = 0; t < T; ++t) {
        // nodal balance
        for (int b = 0; b < d.nb; ++b) {
            Row r;
            for (int g = 0; g < d.ng; ++g)
                if (inst.gens[g].bus == b) r.coeffs.push_back({V.p[g][t], 1.0});
            for (int l = 0; l < d.nl; ++l) {
                if (inst.lines[l].from == b) r.coeffs.push_back({V.lflow[l][t], -1.0});
                if (inst.lines[l].to == b) r.coeffs.push_back({V.lflow[l][t], 1.0});
            }
            for (int e = 0; e < d.ne; ++e)
                if (inst.electrolysers[e].bus == b) r.coeffs.push_back({V.elec[e][t], -1.0});
            r.sense = Sense::EQ;
            r.rhs = day.demand_mw[b][t];
            lp.add_row(std::move(r));
        }
        // DC flow definition, reference angle
        lp.add_row({{V.theta[0][t], 1.0}}, Sense::EQ, 0.0);
        for (int l = 0; l < d.nl; ++l) {
            const Line& ln = inst.lines[l];
            lp.add_row({{V.theta[ln.from][t], 1.0},
                        {V.theta[ln.to][t], -1.0},
                        {V.lflow[l][t], -ln.reactance_pu}},
                       Sense::EQ, 0.0);
        }

        double wind_avail = 0.0;
        for (int g = 0; g < d.ng; ++g)
            if (is_wind(inst.gens[g].type)) wind_avail += inst.gens[g].pmax_mw * day.wind_cf[g][t];

        // commitment coupling, reserve contribution
        Row reserve_row; // sum headroom - reserve >= 0
        for (int g = 0; g < d.ng; ++g) {
            const Generator& gen = inst.gens[g];
            if (gen.type == GenType::Interconnector) continue;
            if (gen.committable) {
                // p <= pmax u ; p >= pmin u ; segments <= width u
                lp.add_row({{V.p[g][t], 1.0}, {V.u[g][t], -gen.pmax_mw}}, Sense::LE, 0.0);
                lp.add_row({{V.p[g][t], 1.0}, {V.u[g][t], -gen.pmin_mw}}, Sense::GE, 0.0);
                if (gen.synchronous) {
                    reserve_row.coeffs.push_back({V.u[g][t], gen.pmax_mw});
                    reserve_row.coeffs.push_back({V.p[g][t], -1.0});
                    // reserve covers the loss of the largest scheduled infeed
                    lp.add_row({{V.reserve[t], 1.0}, {V.p[g][t], -1.0}}, Sense::GE, 0.0);
                }
            } else if (gen.synchronous) {
                reserve_row.coeffs.push_back({V.p[g][t], -1.0});
                reserve_row.rhs -= gen.pmax_mw; // headroom of always-on units
                lp.add_row({{V.reserve[t], 1.0}, {V.p[g][t], -1.0}}, Sense::GE, 0.0);
            }
        }
        // sum of committed headroom covers the reserve requirement; always-on
        // units contribute (pmax - p), whose constant part sits in the rhs
        reserve_row.coeffs.push_back({V.reserve[t], -1.0});
        reserve_row.sense = Sense::GE;
        lp.add_row(std::move(reserve_row));
        lp.add_row({{V.reserve[t], 1.0}}, Sense::GE, inst.policy.reserve_wind_fraction * wind_avail);

        // SNSP
        {
            Row r;
            double rhs = 0.0;
            for (int b = 0; b < d.nb; ++b) rhs += day.demand_mw[b][t];
            rhs *= inst.policy.snsp_cap;
            for (int g = 0; g < d.ng; ++g) {
                const Generator& gen = inst.gens[g];
                if (gen.type == GenType::Interconnector) {
                    r.coeffs.push_back({V.imp[g][t], 1.0});
                    r.coeffs.push_back({V.exp[g][t], -inst.policy.snsp_cap});
                } else if (!gen.synchronous) {
                    r.coeffs.push_back({V.p[g][t], 1.0});
                }
            }
            for (int e = 0; e < d.ne; ++e)
                r.coeffs.push_back({V.elec[e][t], -inst.policy.snsp_cap});
            r.sense = Sense::LE;
            r.rhs = rhs;
            lp.add_row(std::move(r));
        }

        // inertia floor and minimum synchronous units
        {
            Row ri, rn;
            double base_inertia = 0.0;
            int base_units = 0;
            for (int g = 0; g < d.ng; ++g) {
                const Generator& gen = inst.gens[g];
                if (!gen.synchronous) continue;
                if (gen.committable) {
                    ri.coeffs.push_back({V.u[g][t], gen.inertia_mws});
                    rn.coeffs.push_back({V.u[g][t], 1.0});
                } else {
                    base_inertia += gen.inertia_mws;
                    ++base_units;
                }
            }
            if (inst.policy.min_inertia_mws > 0.0) {
                ri.sense = Sense::GE;
                ri.rhs = inst.policy.min_inertia_mws - base_inertia;
                lp.add_row(std::move(ri));
            }
            if (inst.policy.min_synchronous_units > 0) {
                rn.sense = Sense::GE;
                rn.rhs = inst.policy.min_synchronous_units - base_units;
                lp.add_row(std::move(rn));
            }
        }
    }

    // commitment dynamics: start/shut balance, min up/down, ramps
    for (int g = 0; g < d.ng; ++g) {
        const Generator& gen = inst.gens[g];
        if (gen.committable) {
            for (int t = 0; t < T; ++t) {
                const double u_prev_const = (t == 0) ? (gen.init_on ? 1.0 : 0.0) : 0.0;
                Row r; // u_t - u_{t-1} = start_t - shut_t
                r.coeffs.push_back({V.u[g][t], 1.0});
                if (t > 0) r.coeffs.push_back({V.u[g][t - 1], -1.0});
                r.coeffs.push_back({V.start[g][t], -1.0});
                r.coeffs.push_back({V.shut[g][t], 1.0});
                r.sense = Sense::EQ;
                r.rhs = u_prev_const;
                lp.add_row(std::move(r));
            }
            // carry-over of the initial state
            if (gen.init_on && gen.init_hours < gen.min_up_h) {
                for (int t = 0; t < std::min(T, gen.min_up_h - gen.init_hours); ++t)
                    lp.add_row({{V.u[g][t], 1.0}}, Sense::GE, 1.0);
            }
            if (!gen.init_on && gen.init_hours < gen.min_down_h) {
                for (int t = 0; t < std::min(T, gen.min_down_h - gen.init_hours); ++t)
                    lp.add_row({{V.u[g][t], 1.0}}, Sense::LE, 0.0);
            }
            for (int t = 0; t < T; ++t) {
                if (gen.min_up_h > 1) {
                    Row r; // sum of recent starts <= u_t
                    for (int tau = std::max(0, t - gen.min_up_h + 1); tau <= t; ++tau)
                        r.coeffs.push_back({V.start[g][tau], 1.0});
                    r.coeffs.push_back({V.u[g][t], -1.0});
                    r.sense = Sense::LE;
                    r.rhs = 0.0;
                    lp.add_row(std::move(r));
                }
                if (gen.min_down_h > 1) {
                    Row r; // sum of recent shutdowns <= 1 - u_t
                    for (int tau = std::max(0, t - gen.min_down_h + 1); tau <= t; ++tau)
                        r.coeffs.push_back({V.shut[g][tau], 1.0});
                    r.coeffs.push_back({V.u[g][t], 1.0});
                    r.sense = Sense::LE;
                    r.rhs = 1.0;
                    lp.add_row(std::move(r));
                }
            }
        }
        if (gen.type == GenType::Interconnector || is_variable_renewable(gen.type)) continue;
        if (gen.ramp_mw_per_h >= 1e8) continue;
        const double su = std::max(gen.pmin_mw, gen.ramp_mw_per_h);
        for (int t = 0; t < T; ++t) {
            Row up; // p_t - p_{t-1} <= ramp u_{t-1} + su start_t  (committable)
            up.coeffs.push_back({V.p[g][t], 1.0});
            double rhs_up = 0.0;
            if (t > 0) up.coeffs.push_back({V.p[g][t - 1], -1.0});
            else rhs_up += gen.init_p_mw;
            if (gen.committable) {
                if (t > 0) up.coeffs.push_back({V.u[g][t - 1], -gen.ramp_mw_per_h});
                else rhs_up += (gen.init_on ? gen.ramp_mw_per_h : 0.0);
                up.coeffs.push_back({V.start[g][t], -su});
            } else {
                rhs_up += gen.ramp_mw_per_h;
            }
            up.sense = Sense::LE;
            up.rhs = rhs_up;
            lp.add_row(std::move(up));

            Row dn; // p_{t-1} - p_t <= ramp u_t + sd shut_t
            dn.coeffs.push_back({V.p[g][t], -1.0});
            double rhs_dn = 0.0;
            if (t > 0) dn.coeffs.push_back({V.p[g][t - 1], 1.0});
            else rhs_dn -= gen.init_p_mw;
            if (gen.committable) {
                dn.coeffs.push_back({V.u[g][t], -gen.ramp_mw_per_h});
                dn.coeffs.push_back({V.shut[g][t], -su});
            } else {
                rhs_dn += gen.ramp_mw_per_h;
            }
            dn.sense = Sense::LE;
            dn.rhs = rhs_dn;
            lp.add_row(std::move(dn));
        }
    }

    // --- gas-side constraints
    for (int t = 0; t < T; ++t) {
        for (int n = 0; n < d.nn; ++n) {
            const GasNode& gn = inst.gas_nodes[n];
            // volumetric balance
            Row vol;
            vol.coeffs.push_back({V.supply[n][t], 1.0});
            for (int p = 0; p < d.np; ++p) {
                if (inst.pipes[p].to == n) vol.coeffs.push_back({V.fpipe[p][t], 1.0});
                if (inst.pipes[p].from == n) vol.coeffs.push_back({V.fpipe[p][t], -1.0});
            }
            for (int e = 0; e < d.ne; ++e)
                if (inst.electrolysers[e].gas_node == n)
                    vol.coeffs.push_back({V.inj_mwth[e][t], 1.0 / hhv_h2});
            vol.coeffs.push_back({V.lpk[n][t], -1.0});
            vol.coeffs.push_back({V.dvol[n][t], -1.0});
            vol.sense = Sense::EQ;
            vol.rhs = 0.0;
            lp.add_row(std::move(vol));

            // hydrogen-volume balance (only with a positive blending cap)
            if (blending) {
                Row h2b;
                for (int p = 0; p < d.np; ++p) {
                    if (inst.pipes[p].to == n) h2b.coeffs.push_back({V.wpipe[p][t], 1.0});
                    if (inst.pipes[p].from == n) h2b.coeffs.push_back({V.wpipe[p][t], -1.0});
                }
                for (int e = 0; e < d.ne; ++e)
                    if (inst.electrolysers[e].gas_node == n)
                        h2b.coeffs.push_back({V.inj_mwth[e][t], 1.0 / hhv_h2});
                h2b.coeffs.push_back({V.wlpk[n][t], -1.0});
                h2b.coeffs.push_back({V.wdem[n][t], -1.0});
                h2b.sense = Sense::EQ;
                h2b.rhs = 0.0;
                lp.add_row(std::move(h2b));
            }

            // delivered heat equals thermal demand plus gas-unit fuel
            Row heat;
            heat.coeffs.push_back({V.dvol[n][t], hhv_ch4});
            if (blending) heat.coeffs.push_back({V.wdem[n][t], hhv_h2 - hhv_ch4});
            for (int g = 0; g < d.ng; ++g) {
                const Generator& gen = inst.gens[g];
                if (gen.gas_node != n || gen.type != GenType::Gas) continue;
                for (std::size_t s = 0; s < gen.segments.size(); ++s)
                    heat.coeffs.push_back({V.pseg[g][s][t], -gen.segments[s].heat_mwh_th_per_mwh});
            }
            heat.sense = Sense::EQ;
            heat.rhs = day.gas_demand_mwth[n][t];
            lp.add_row(std::move(heat));

            // linepack stock window and McCormick for the products
            if (gn.linepack_kvol > 0.0) {
                Row stock; // 0 <= stock0 + sum lpk <= capacity
                for (int tau = 0; tau <= t; ++tau) stock.coeffs.push_back({V.lpk[n][tau], 1.0});
                Row stock_hi = stock;
                stock.sense = Sense::GE;
                stock.rhs = -gn.linepack_kvol / 2.0;
                lp.add_row(std::move(stock));
                stock_hi.sense = Sense::LE;
                stock_hi.rhs = gn.linepack_kvol / 2.0;
                lp.add_row(std::move(stock_hi));
                if (t == T - 1) {
                    Row terminal;
                    for (int tau = 0; tau < T; ++tau) terminal.coeffs.push_back({V.lpk[n][tau], 1.0});
                    terminal.sense = Sense::EQ;
                    terminal.rhs = 0.0;
                    lp.add_row(std::move(terminal));
                }
            }
        }
    }

    // McCormick envelopes and Weymouth coupling
    const double r_frac = scp ? scp->box_radius : 1.0;
    auto clampbox = [](double lo, double hi, double centre, double radius) {
        gas::Box b;
        b.x_lo = std::max(lo, centre - radius);
        b.x_hi = std::min(hi, centre + radius);
        if (b.x_lo > b.x_hi) {
            b.x_lo = lo;
            b.x_hi = hi;
        }
        return std::pair<double, double>{b.x_lo, b.x_hi};
    };
    for (int t = 0; t < T; ++t) {
        for (int n = 0; n < d.nn && blending; ++n) {
            // demand offtake product w = dvol * y
            double dcap = 0.0;
            for (int nn2 = 0; nn2 < d.nn; ++nn2) dcap += inst.gas_nodes[nn2].supply_cap_kvol_h;
            for (int e = 0; e < d.ne; ++e)
                if (inst.electrolysers[e].gas_node >= 0)
                    dcap += inst.electrolysers[e].cap_mw / hhv_h2;
            auto [xl, xh] = scp ? clampbox(0.0, dcap, scp->dvol_hat[n][t], r_frac * dcap)
                                : std::pair<double, double>{0.0, dcap};
            auto [yl, yh] = scp ? clampbox(0.0, ycap, scp->y_hat[n][t], r_frac * std::max(ycap, 1e-9))
                                : std::pair<double, double>{0.0, ycap};
            gas::Box box{xl, xh, yl, yh};
            for (auto& row : gas::mccormick(box, V.dvol[n][t], V.y[n][t], V.wdem[n][t]))
                lp.add_row(std::move(row));
            if (inst.gas_nodes[n].linepack_kvol > 0.0) {
                const double rate = std::min(inst.gas_nodes[n].linepack_rate_kvol_h,
                                             inst.gas_nodes[n].linepack_kvol);
                auto [ll, lh] = scp ? clampbox(-rate, rate, scp->lpk_hat[n][t], r_frac * 2.0 * rate)
                                    : std::pair<double, double>{-rate, rate};
                gas::Box lbox{ll, lh, yl, yh};
                for (auto& row : gas::mccormick(lbox, V.lpk[n][t], V.y[n][t], V.wlpk[n][t]))
                    lp.add_row(std::move(row));
            }
        }
        for (int p = 0; p < d.np; ++p) {
            const Pipeline& pl = inst.pipes[p];
            const int sign = scp ? scp->flow_sign[p][t] : 1;
            const int upwind = sign >= 0 ? pl.from : pl.to;
            if (blending) {
                double flo = scp ? (sign >= 0 ? 0.0 : -pl.cap_kvol_h) : -pl.cap_kvol_h;
                double fhi = scp ? (sign >= 0 ? pl.cap_kvol_h : 0.0) : pl.cap_kvol_h;
                if (scp) {
                    const double centre = sign >= 0 ? scp->fabs_hat[p][t] : -scp->fabs_hat[p][t];
                    auto [l2, h2] = clampbox(flo, fhi, centre, r_frac * pl.cap_kvol_h);
                    flo = l2;
                    fhi = h2;
                }
                auto [yl, yh] = scp ? clampbox(0.0, ycap, scp->y_hat[upwind][t],
                                               r_frac * std::max(ycap, 1e-9))
                                    : std::pair<double, double>{0.0, ycap};
                gas::Box box{flo, fhi, yl, yh};
                for (auto& row : gas::mccormick(box, V.fpipe[p][t], V.y[upwind][t], V.wpipe[p][t]))
                    lp.add_row(std::move(row));
            }

            if (scp) {
                const int pin = sign >= 0 ? pl.from : pl.to;
                const int pout = sign >= 0 ? pl.to : pl.from;
                // convex side as a cut oracle: K f^2 <= pi_up - pi_dn
                m.milp.cones.push_back(std::make_shared<gas::WeymouthCone>(
                    V.fpipe[p][t], V.pi[pin][t], V.pi[pout][t], pl.weymouth_k));
                // linearised concave side with penalised slack:
                // pi_up - pi_dn <= K (2 fhat |f| - fhat^2) + slack
                const double fh = scp->fabs_hat[p][t];
                Row r;
                r.coeffs.push_back({V.pi[pin][t], 1.0});
                r.coeffs.push_back({V.pi[pout][t], -1.0});
                r.coeffs.push_back({V.fpipe[p][t], -2.0 * pl.weymouth_k * fh * (sign >= 0 ? 1.0 : -1.0)});
                r.coeffs.push_back({V.wey_slack[p][t], -1.0});
                r.sense = Sense::LE;
                r.rhs = -pl.weymouth_k * fh * fh;
                lp.add_row(std::move(r));
            }
        }
    }

    return m;
}

// ---------------------------------------------------------------------------
// Solve + extraction
// ---------------------------------------------------------------------------

namespace {

double val(const solver::Solution& s, int var) { return var >= 0 ? s.values[var] : 0.0; }

DayDispatch extract_day(const ComInstance& inst, const Day& day, const UcModel& m,
                        const solver::Solution& sol) {
    const VarMap& V = m.vars;
    const int T = V.T;
    DayDispatch out;
    out.day_name = day.name;
    out.weight_days = day.weight_days;
    out.hours.resize(T);
    const int ng = static_cast<int>(inst.gens.size());
    const int nl = static_cast<int>(inst.lines.size());
    const int nb = static_cast<int>(inst.buses.size());
    const int nn = static_cast<int>(inst.gas_nodes.size());
    const int np = static_cast<int>(inst.pipes.size());
    const int ne = static_cast<int>(inst.electrolysers.size());

    double cost = 0.0;
    for (int t = 0; t < T; ++t) {
        HourDispatch& h = out.hours[t];
        h.on.resize(ng, 1);
        h.gen_mw.resize(ng, 0.0);
        h.flow_mw.resize(nl, 0.0);
        h.angle.resize(nb, 0.0);
        h.gas_flow_kvol.resize(np, 0.0);
        h.pressure_bar.resize(nn, 0.0);
        h.h2_fraction.resize(nn, 0.0);
        for (int b = 0; b < nb; ++b) {
            h.demand_mw += day.demand_mw[b][t];
            h.angle[b] = val(sol, V.theta[b][t]);
        }
        for (int g = 0; g < ng; ++g) {
            const Generator& gen = inst.gens[g];
            h.gen_mw[g] = val(sol, V.p[g][t]);
            if (gen.committable) {
                h.on[g] = val(sol, V.u[g][t]) > 0.5 ? 1 : 0;
                cost += gen.no_load_cost_eur_per_h * h.on[g] +
                        gen.start_cost_eur * val(sol, V.start[g][t]);
            }
            if (gen.type == GenType::Interconnector) {
                h.import_mw += val(sol, V.imp[g][t]);
                h.export_mw += val(sol, V.exp[g][t]);
                cost += inst.policy.import_cost_eur_per_mwh * val(sol, V.imp[g][t]) -
                        inst.policy.export_price_eur_per_mwh * val(sol, V.exp[g][t]);
            } else {
                for (std::size_t s = 0; s < gen.segments.size(); ++s)
                    cost += gen.segments[s].cost_eur_per_mwh * val(sol, V.pseg[g][s][t]);
            }
            if (is_wind(gen.type)) {
                h.wind_avail_mw += gen.pmax_mw * day.wind_cf[g][t];
                h.wind_used_mw += h.gen_mw[g];
            }
        }
        for (int l = 0; l < nl; ++l) h.flow_mw[l] = val(sol, V.lflow[l][t]);
        for (int e = 0; e < ne; ++e) {
            h.elec_mw += val(sol, V.elec[e][t]);
            h.h2_export_mwth += val(sol, V.export_h2[e][t]);
            h.h2_export_elec_mw += val(sol, V.export_h2[e][t]) / inst.electrolysers[e].efficiency;
            cost -= inst.h2_export_value_eur_per_mwh * val(sol, V.export_h2[e][t]);
        }
        for (int n = 0; n < nn; ++n) {
            h.pressure_bar[n] = std::sqrt(std::max(0.0, val(sol, V.pi[n][t])));
            h.h2_fraction[n] = val(sol, V.y[n][t]);
            cost += inst.gas_nodes[n].supply_cost_eur_per_mwh_th *
                    (inst.constants.ch4.hhv_mj_m3 / 3.6) * val(sol, V.supply[n][t]);
        }
        for (int p = 0; p < np; ++p) h.gas_flow_kvol[p] = val(sol, V.fpipe[p][t]);
    }
    out.cost_eur = cost;
    return out;
}

struct Residuals {
    double weymouth = 0.0;
    double mixing = 0.0;
};

Residuals day_residuals(const ComInstance& inst, const UcModel& m, const solver::Solution& sol) {
    const VarMap& V = m.vars;
    Residuals r;
    double pmax2 = 1.0;
    for (const auto& n : inst.gas_nodes)
        pmax2 = std::max(pmax2, n.pressure_max_bar * n.pressure_max_bar);
    for (int t = 0; t < V.T; ++t) {
        for (std::size_t p = 0; p < inst.pipes.size(); ++p) {
            const auto& pl = inst.pipes[p];
            const double f = val(sol, V.fpipe[p][t]);
            const double resid = val(sol, V.pi[pl.from][t]) - val(sol, V.pi[pl.to][t]) -
                                 pl.weymouth_k * f * std::abs(f);
            r.weymouth = std::max(r.weymouth, std::abs(resid) / pmax2);
            const int upwind = f >= 0.0 ? pl.from : pl.to;
            const double w = val(sol, V.wpipe[p][t]);
            const double denom = std::max(1.0, pl.cap_kvol_h);
            r.mixing = std::max(r.mixing, std::abs(w - f * val(sol, V.y[upwind][t])) / denom);
        }
        for (std::size_t n = 0; n < inst.gas_nodes.size(); ++n) {
            const double dv = val(sol, V.dvol[n][t]);
            const double w = val(sol, V.wdem[n][t]);
            const double denom = std::max(1.0, dv + 1.0);
            r.mixing = std::max(r.mixing, std::abs(w - dv * val(sol, V.y[n][t])) / denom);
            if (inst.gas_nodes[n].linepack_kvol > 0.0) {
                const double lv = val(sol, V.lpk[n][t]);
                const double wl = val(sol, V.wlpk[n][t]);
                r.mixing = std::max(r.mixing, std::abs(wl - lv * val(sol, V.y[n][t])) /
                                                  std::max(1.0, std::abs(lv) + 1.0));
            }
        }
    }
    return r;
}

// Physically consistent nodal compositions for the iterate's flows: supply
// is pure natural gas, injections are pure hydrogen, and every node mixes
// its inflows. Propagation follows the flow-direction DAG (Kahn order);
// nodes left in a cycle fall back to the LP's own composition.
std::vector<std::vector<double>> reconstruct_compositions(const ComInstance& inst, const UcModel& m,
                                                          const solver::Solution& sol) {
    const VarMap& V = m.vars;
    const int T = V.T;
    const int nn = static_cast<int>(inst.gas_nodes.size());
    const int np = static_cast<int>(inst.pipes.size());
    const double hhv_h2 = inst.constants.h2.hhv_mj_m3 / 3.6;
    std::vector<std::vector<double>> y(nn, std::vector<double>(T, 0.0));
    for (int t = 0; t < T; ++t) {
        std::vector<double> vol_in(nn, 0.0), h2_in(nn, 0.0);
        std::vector<int> pending(nn, 0); // unresolved upstream pipes
        for (int n = 0; n < nn; ++n) vol_in[n] += val(sol, V.supply[n][t]);
        for (std::size_t e = 0; e < inst.electrolysers.size(); ++e) {
            const int n = inst.electrolysers[e].gas_node;
            if (n < 0) continue;
            const double v = val(sol, V.inj_mwth[e][t]) / hhv_h2;
            vol_in[n] += v;
            h2_in[n] += v;
        }
        for (int n = 0; n < nn; ++n) {
            const double lpk = val(sol, V.lpk[n][t]);
            if (lpk < -1e-9) { // discharge at the LP's composition estimate
                vol_in[n] += -lpk;
                h2_in[n] += -lpk * val(sol, V.y[n][t]);
            }
        }
        std::vector<std::pair<int, int>> edges; // (pipe, direction sign)
        for (int p = 0; p < np; ++p) {
            const double f = val(sol, V.fpipe[p][t]);
            if (std::abs(f) < 1e-9) continue;
            const int dst = f > 0 ? inst.pipes[p].to : inst.pipes[p].from;
            edges.push_back({p, f > 0 ? 1 : -1});
            ++pending[dst];
        }
        std::vector<int> queue;
        std::vector<bool> done(nn, false);
        for (int n = 0; n < nn; ++n)
            if (pending[n] == 0) queue.push_back(n);
        std::size_t qi = 0;
        while (qi < queue.size()) {
            const int n = queue[qi++];
            done[n] = true;
            y[n][t] = vol_in[n] > 1e-9 ? h2_in[n] / vol_in[n] : 0.0;
            for (auto& [p, sign] : edges) {
                const int src = sign > 0 ? inst.pipes[p].from : inst.pipes[p].to;
                const int dst = sign > 0 ? inst.pipes[p].to : inst.pipes[p].from;
                if (src != n) continue;
                const double f = std::abs(val(sol, V.fpipe[p][t]));
                vol_in[dst] += f;
                h2_in[dst] += f * y[n][t];
                if (--pending[dst] == 0) queue.push_back(dst);
            }
        }
        for (int n = 0; n < nn; ++n)
            if (!done[n]) y[n][t] = val(sol, V.y[n][t]);
    }
    return y;
}

bool gas_side_active(const ComInstance& inst, const Day& day) {
    for (std::size_t n = 0; n < inst.gas_nodes.size(); ++n)
        for (int t = 0; t < day.hours(); ++t)
            if (day.gas_demand_mwth[n][t] > 0.0) return true;
    for (const auto& g : inst.gens)
        if (g.type == GenType::Gas && g.gas_node >= 0) return true;
    for (const auto& e : inst.electrolysers)
        if (e.gas_node >= 0) return true;
    return false;
}

} // namespace

double snsp(const HourDispatch& h, const ComInstance& inst) {
    double nonsync = h.import_mw;
    for (std::size_t g = 0; g < inst.gens.size(); ++g)
        if (!inst.gens[g].synchronous && inst.gens[g].type != GenType::Interconnector)
            nonsync += h.gen_mw[g];
    const double denom = h.demand_mw + h.elec_mw + h.export_mw;
    if (denom <= 0.0) throw ValidationError("snsp: zero demand plus exports");
    return nonsync / denom;
}

double curtailment_rate(const DispatchResult& r) {
    if (r.wind_available_mwh <= 0.0) return 0.0;
    return 1.0 - r.wind_used_mwh / r.wind_available_mwh;
}

double export_potential(const DispatchResult& r, double efficiency) {
    return r.h2_export_elec_mwh * efficiency;
}

namespace {

struct DayOutcome {
    DayDispatch dispatch;
    bool have_solution = false;
    solver::Status status = solver::Status::Optimal;
};

DayOutcome solve_one_day(const ComInstance& inst, const Day& day, const ScpOptions& opts) {
    DayOutcome outcome;
    const int T = day.hours();
    const int np = static_cast<int>(inst.pipes.size());
    const int nn = static_cast<int>(inst.gas_nodes.size());
    const bool gas_active = gas_side_active(inst, day);

    ScpState state;
    state.flow_sign.assign(np, std::vector<int>(T, 1));
    state.fabs_hat.assign(np, std::vector<double>(T, 0.0));
    state.y_hat.assign(nn, std::vector<double>(T, 0.0));
    state.dvol_hat.assign(nn, std::vector<double>(T, 0.0));
    state.lpk_hat.assign(nn, std::vector<double>(T, 0.0));

    DayDispatch best;
    solver::BnbOptions bopts;
    bopts.node_limit = opts.bnb_node_limit;

    std::vector<std::vector<double>> prev_fabs;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        UcModel model = build_uc(inst, day, iter == 0 ? nullptr : &state);
        auto sol = solver::branch_and_bound(model.milp, bopts);
        if (sol.status != solver::Status::Optimal) {
            if (iter == 0) {
                outcome.status = sol.status;
                outcome.dispatch.day_name = day.name;
                outcome.dispatch.weight_days = day.weight_days;
                return outcome;
            }
            // shrunken boxes can strand the iterate; widen once and retry
            state.box_radius = std::min(1.0, state.box_radius * 4.0);
            continue;
        }
        bopts.root_warm = sol.root_basis; // next iteration starts nearby

        const auto resid = day_residuals(inst, model, sol);
#ifdef H2_SCP_TRACE
        std::fprintf(stderr, "scp %s iter=%d radius=%.3f wey=%.3e mix=%.3e obj=%.2f nodes=%ld\n",
                     day.name.c_str(), iter, state.box_radius, resid.weymouth, resid.mixing,
                     sol.objective, sol.nodes);
#endif
        best = extract_day(inst, day, model, sol);
        best.scp_iterations = iter + 1;
        best.max_weymouth_residual = resid.weymouth;
        best.max_mixing_residual = resid.mixing;
        outcome.have_solution = true;

        if (!gas_active || (resid.weymouth <= opts.tol && resid.mixing <= opts.tol)) {
            best.converged = true;
            break;
        }

        // update linearisation points / boxes from this iterate
        const VarMap& V = model.vars;
        std::vector<std::vector<double>> new_fabs(np, std::vector<double>(T, 0.0));
        for (int p = 0; p < np; ++p) {
            for (int t = 0; t < T; ++t) {
                const double f = val(sol, V.fpipe[p][t]);
                int sign = state.flow_sign[p][t];
                if (std::abs(f) > 1e-7) sign = f >= 0.0 ? 1 : -1;
                else if (iter == 0) sign = 1;
                else {
                    // zero flow wanting to reverse: pressure gradient points against
                    const auto& pl = inst.pipes[p];
                    const int up = sign >= 0 ? pl.from : pl.to;
                    const int dn = sign >= 0 ? pl.to : pl.from;
                    if (val(sol, V.pi[up][t]) < val(sol, V.pi[dn][t]) - 1e-6) sign = -sign;
                }
                state.flow_sign[p][t] = sign;
                double fh = std::abs(f);
                if (!prev_fabs.empty()) {
                    // damp oscillation
                    const double prev = state.fabs_hat[p][t];
                    const double last_step = prev - prev_fabs[p][t];
                    const double new_step = fh - prev;
                    if (last_step * new_step < 0.0) fh = 0.5 * (fh + prev);
                }
                new_fabs[p][t] = fh;
            }
        }
        prev_fabs = state.fabs_hat;
        state.fabs_hat = new_fabs;
        const auto y_phys = reconstruct_compositions(inst, model, sol);
        for (int n = 0; n < nn; ++n) {
            for (int t = 0; t < T; ++t) {
                state.y_hat[n][t] = y_phys[n][t];
                state.dvol_hat[n][t] = val(sol, V.dvol[n][t]);
                state.lpk_hat[n][t] = val(sol, V.lpk[n][t]);
            }
        }
        state.box_radius = (iter == 0) ? 1.0 : std::max(1e-5, state.box_radius * 0.5);
        state.iteration = iter + 1;
    }

    if (outcome.have_solution) {
        // post-hoc security sweep over every node-hour composition
        best.security_ok = true;
        for (const auto& h : best.hours) {
            for (double y : h.h2_fraction) {
                auto chk = gas::check_security(gas::GasComposition::blend(std::min(1.0, std::max(0.0, y))),
                                               inst.security, inst.constants);
                if (!chk.pass) best.security_ok = false;
            }
        }
        outcome.dispatch = std::move(best);
    }
    return outcome;
}

} // namespace

DispatchResult sequential_convex_solve(const ComInstance& inst, const ScpOptions& opts) {
    inst.validate();
    DispatchResult result;
    result.converged = true;

    // representative days are independent; solve them concurrently
    std::vector<std::future<DayOutcome>> futures;
    futures.reserve(inst.days.size());
    for (const Day& day : inst.days)
        futures.push_back(std::async(std::launch::async,
                                     [&inst, &day, &opts]() { return solve_one_day(inst, day, opts); }));
    for (auto& f : futures) {
        DayOutcome outcome = f.get();
        if (outcome.status != solver::Status::Optimal) {
            result.status = outcome.status;
            result.converged = false;
        }
        if (outcome.have_solution || !outcome.dispatch.day_name.empty()) {
            if (!outcome.dispatch.converged) result.converged = false;
            result.days.push_back(std::move(outcome.dispatch));
        }
    }

    for (const auto& dd : result.days) {
        const double w = dd.weight_days;
        result.total_cost_eur += dd.cost_eur * w;
        for (const auto& h : dd.hours) {
            result.wind_available_mwh += h.wind_avail_mw * w;
            result.wind_used_mwh += h.wind_used_mw * w;
            result.h2_exported_mwh += h.h2_export_mwth * w;
            result.h2_export_elec_mwh += h.h2_export_elec_mw * w;
        }
    }
    return result;
}

} // namespace h2::powergas
