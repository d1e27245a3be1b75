#include "h2/trade.hpp"
#include "h2/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace h2::trade {

using solver::kInf;
using solver::Row;
using solver::Sense;

void TradeInstance::validate() const {
    for (const auto& [country, demand] : demands_twh)
        if (demand < 0.0) throw ValidationError("trade: negative demand for " + country);
    for (const auto& s : supplies) {
        s.curve.validate();
        if (s.export_cap_twh < 0.0) throw ValidationError("trade: negative export cap for " + s.country);
    }
    for (const auto& r : routes) {
        if (r.distance_km <= 0.0) throw ValidationError("trade: route distance must be positive");
        if (r.ship_capacity_twh <= 0.0 || r.ship_annualised_cost_eur < 0.0 || r.fuel_cost_eur_per_twh_km < 0.0)
            throw ValidationError("trade: ship parameters must be positive");
    }
}

TradeInstance TradeInstance::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open trade file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    TradeInstance inst;
    try {
        inst.year = j.value("year", 2030);
        for (const auto& s : j.value("supplies", nlohmann::json::array())) {
            CountrySupply cs;
            cs.country = s.at("country").get<std::string>();
            cs.year = inst.year;
            cs.export_cap_twh = s.at("export_cap_twh").get<double>();
            for (const auto& bp : s.at("curve"))
                cs.curve.breakpoints.push_back({bp.at(0).get<double>(), bp.at(1).get<double>()});
            cs.curve.country = cs.country;
            cs.curve.year = inst.year;
            inst.supplies.push_back(std::move(cs));
        }
        for (const auto& [k, v] : j.at("demands_twh").items())
            inst.demands_twh[k] = v.get<double>();
        for (const auto& r : j.value("routes", nlohmann::json::array())) {
            Route rt;
            rt.from = r.at("from").get<std::string>();
            rt.to = r.at("to").get<std::string>();
            rt.distance_km = r.at("distance_km").get<double>();
            rt.ship_capacity_twh = r.at("ship_capacity_twh").get<double>();
            rt.ship_annualised_cost_eur = r.at("ship_annualised_cost_eur").get<double>();
            rt.fuel_cost_eur_per_twh_km = r.at("fuel_cost_eur_per_twh_km").get<double>();
            inst.routes.push_back(std::move(rt));
        }
        inst.backstop_enabled = j.value("backstop_enabled", true);
        inst.backstop_price_eur_per_mwh = j.value("backstop_price_eur_per_mwh", 150.0);
        inst.backstop_green = j.value("backstop_green", false);
        inst.carbon_factor_t_per_mwh = j.value("carbon_factor_t_per_mwh", 0.3);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    inst.validate();
    return inst;
}

PiecewiseCost piecewise_cost(solver::MilpProblem& milp, const lcoh::SupplyCurve& curve) {
    curve.validate();
    if (curve.breakpoints.empty()) throw ValidationError("piecewise cost: empty supply curve");
    solver::LinearProgram& lp = milp.lp;

    // interpolation points: origin plus each breakpoint; cumulative cost is
    // the integral of the step curve (MEUR = EUR/MWh * TWh)
    std::vector<double> q{0.0}, c{0.0};
    double acc = 0.0, prev_q = 0.0;
    for (const auto& [cap, lcoh] : curve.breakpoints) {
        acc += (cap - prev_q) * lcoh;
        q.push_back(cap);
        c.push_back(acc);
        prev_q = cap;
    }
    const int K = static_cast<int>(q.size()); // points
    PiecewiseCost pc;
    pc.quantity_var = lp.add_var(0.0, q.back(), 0.0);
    pc.cost_var = lp.add_var(0.0, kInf, 1.0); // objective carries the cost
    Row qrow{{{pc.quantity_var, 1.0}}, Sense::EQ, 0.0};
    Row crow{{{pc.cost_var, 1.0}}, Sense::EQ, 0.0};
    Row convex;
    for (int i = 0; i < K; ++i) {
        const int lam = lp.add_var(0.0, 1.0, 0.0);
        pc.lambda_vars.push_back(lam);
        qrow.coeffs.push_back({lam, -q[i]});
        crow.coeffs.push_back({lam, -c[i]});
        convex.coeffs.push_back({lam, 1.0});
    }
    convex.sense = Sense::EQ;
    convex.rhs = 1.0;
    lp.add_row(std::move(qrow));
    lp.add_row(std::move(crow));
    lp.add_row(std::move(convex));
    // adjacency binaries: lambda_i > 0 only on one active segment
    Row onehot;
    for (int s = 1; s < K; ++s) {
        const int z = lp.add_var(0.0, 1.0, 0.0);
        milp.integer.resize(lp.num_vars(), false);
        milp.integer[z] = true;
        pc.segment_binaries.push_back(z);
        onehot.coeffs.push_back({z, 1.0});
    }
    onehot.sense = Sense::EQ;
    onehot.rhs = 1.0;
    lp.add_row(std::move(onehot));
    for (int i = 0; i < K; ++i) {
        Row adj{{{pc.lambda_vars[i], 1.0}}, Sense::LE, 0.0};
        if (i > 0) adj.coeffs.push_back({pc.segment_binaries[i - 1], -1.0});
        if (i < K - 1) adj.coeffs.push_back({pc.segment_binaries[i], -1.0});
        lp.add_row(std::move(adj));
    }
    milp.integer.resize(lp.num_vars(), false);
    return pc;
}

ShippingCost shipping_cost(const Route& route, double quantity_twh) {
    if (quantity_twh < 0.0) throw ValidationError("shipping cost: negative quantity");
    ShippingCost sc;
    if (quantity_twh <= 0.0) return sc;
    sc.ships = static_cast<long>(std::ceil(quantity_twh / route.ship_capacity_twh - 1e-9));
    sc.cost_eur = static_cast<double>(sc.ships) * route.ship_annualised_cost_eur +
                  quantity_twh * route.distance_km * route.fuel_cost_eur_per_twh_km;
    return sc;
}

TradeModel build_trade_milp(const TradeInstance& inst) {
    inst.validate();
    TradeModel m;
    solver::LinearProgram& lp = m.milp.lp;

    std::map<std::string, int> supply_index;
    for (std::size_t s = 0; s < inst.supplies.size(); ++s) {
        supply_index[inst.supplies[s].country] = static_cast<int>(s);
        m.production.push_back(piecewise_cost(m.milp, inst.supplies[s].curve));
        // export cap from the dispatch stage
        lp.add_row({{m.production.back().quantity_var, 1.0}}, Sense::LE,
                   inst.supplies[s].export_cap_twh);
    }
    for (const auto& r : inst.routes) {
        if (!supply_index.count(r.from))
            throw ValidationError("trade: route from unknown exporter " + r.from);
        const double fuel_meur_per_twh = r.distance_km * r.fuel_cost_eur_per_twh_km / 1e6;
        m.flow_vars.push_back(lp.add_var(0.0, kInf, fuel_meur_per_twh));
        m.ship_vars.push_back(lp.add_var(0.0, 1000.0, r.ship_annualised_cost_eur / 1e6));
        m.milp.integer.resize(lp.num_vars(), false);
        m.milp.integer[m.ship_vars.back()] = true;
        // fleet coupling: flow <= ships * capacity
        lp.add_row({{m.flow_vars.back(), 1.0}, {m.ship_vars.back(), -r.ship_capacity_twh}},
                   Sense::LE, 0.0);
    }
    // exporter balance: production equals shipped volume
    for (std::size_t s = 0; s < inst.supplies.size(); ++s) {
        Row r{{{m.production[s].quantity_var, 1.0}}, Sense::EQ, 0.0};
        for (std::size_t k = 0; k < inst.routes.size(); ++k)
            if (inst.routes[k].from == inst.supplies[s].country)
                r.coeffs.push_back({m.flow_vars[k], -1.0});
        lp.add_row(std::move(r));
    }
    // importer balance: inflows plus backstop meet demand exactly
    for (const auto& [country, demand] : inst.demands_twh) {
        if (demand <= 0.0) continue;
        m.importers.push_back(country);
        Row r;
        for (std::size_t k = 0; k < inst.routes.size(); ++k)
            if (inst.routes[k].to == country) r.coeffs.push_back({m.flow_vars[k], 1.0});
        int bvar = -1;
        if (inst.backstop_enabled) {
            bvar = lp.add_var(0.0, kInf, inst.backstop_price_eur_per_mwh);
            m.milp.integer.resize(lp.num_vars(), false);
            r.coeffs.push_back({bvar, 1.0});
        }
        m.backstop_vars.push_back(bvar);
        r.sense = Sense::EQ;
        r.rhs = demand;
        lp.add_row(std::move(r));
    }
    m.milp.integer.resize(lp.num_vars(), false);
    return m;
}

TradePlan solve_trade(const TradeInstance& inst, const TradeModel& model) {
    TradePlan plan;
    auto sol = solver::branch_and_bound(model.milp);
    plan.status = sol.status;
    if (sol.status != solver::Status::Optimal && sol.status != solver::Status::IterationLimit)
        return plan;
    plan.objective_meur = sol.objective;
    for (std::size_t s = 0; s < inst.supplies.size(); ++s) {
        const double q = sol.values[model.production[s].quantity_var];
        plan.production_twh[inst.supplies[s].country] = q;
    }
    for (std::size_t k = 0; k < inst.routes.size(); ++k) {
        const double f = sol.values[model.flow_vars[k]];
        const auto& r = inst.routes[k];
        plan.ships[r.from + "->" + r.to] = std::lround(sol.values[model.ship_vars[k]]);
        if (f > 1e-9) plan.flows.push_back({r.from, r.to, f});
    }
    for (std::size_t i = 0; i < model.importers.size(); ++i) {
        if (model.backstop_vars[i] < 0) continue;
        const double b = sol.values[model.backstop_vars[i]];
        if (b > 1e-9) plan.flows.push_back({"ITN", model.importers[i], b});
    }
    return plan;
}

TradePlan solve_trade(const TradeInstance& inst) {
    return solve_trade(inst, build_trade_milp(inst));
}

CarbonLedger carbon_reduction(const TradePlan& plan, double factor_t_per_mwh, bool backstop_green) {
    if (factor_t_per_mwh <= 0.0) throw ValidationError("carbon factor must be positive");
    CarbonLedger ledger;
    for (const auto& [from, to, twh] : plan.flows) {
        if (from == "ITN" && !backstop_green) continue;
        const double mt = twh * factor_t_per_mwh; // TWh * t/MWh = Mt
        ledger.reduction_mt[to] += mt;
        ledger.attribution[to][from] += mt;
        ledger.total_mt += mt;
    }
    return ledger;
}

} // namespace h2::trade
