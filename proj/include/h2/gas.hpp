#pragma once
#include "h2/solver.hpp"

#include <array>
#include <string>
#include <vector>

// Gas blend physics: composition mixing, interchangeability indices
// (Wobbe, relative density, Weaver flame speed factor), the Weymouth
// pressure-flow relation, and the convexification building blocks
// (McCormick envelopes, second-order-cone relaxation).

namespace h2::gas {

struct ComponentProps {
    double hhv_mj_m3 = 0.0;       // higher heating value, volumetric
    double specific_gravity = 0.0; // relative to air
    double flame_coeff = 0.0;      // Weaver flame-speed coefficient F
    double air_requirement = 0.0;  // stoichiometric air volume A
};

// Per-component constants. Weaver flame speed factor of a blend:
//   S = sum_i y_i F_i / (sum_i y_i A_i + 1)
// (hydrogen ~100 on this scale). Blending of HHV and specific gravity is
// linear by volume.
struct ConstantsTable {
    ComponentProps h2{12.7, 0.0696, 339.0, 2.38};
    ComponentProps ch4{39.8, 0.5537, 148.0, 9.52};

    static ConstantsTable from_json(const std::string& path);
};

struct GasComposition {
    double h2_fraction = 0.0;  // by volume
    double ch4_fraction = 1.0;

    void validate() const;
    static GasComposition blend(double h2_fraction);
};

double hhv_mj_m3(const GasComposition& c, const ConstantsTable& t = {});
double specific_gravity(const GasComposition& c, const ConstantsTable& t = {});
double wobbe_index(const GasComposition& c, const ConstantsTable& t = {});
double weaver_factor(const GasComposition& c, const ConstantsTable& t = {});

struct SecurityRegion {
    double wobbe_min = 0.0, wobbe_max = 0.0;      // MJ/m^3
    double density_min = 0.0, density_max = 0.0;  // relative density
    double weaver_min = 0.0, weaver_max = 0.0;
    double h2_fraction_cap = 0.0; // scenario blending cap (0, 0.2, 1.0)

    void validate() const;
};

struct SecurityCheck {
    bool pass = true;
    std::vector<std::string> violations; // axis names: wobbe, density, weaver, h2_cap
};

SecurityCheck check_security(const GasComposition& c, const SecurityRegion& region,
                             const ConstantsTable& t = {});

// Volumetric flow-weighted mixing. All-zero flow is an error.
GasComposition mix_at_node(const std::vector<std::pair<double, GasComposition>>& inflows);

// p_from^2 - p_to^2 - K * flow * |flow|; zero for physical states.
double weymouth_residual(double p_from_bar, double p_to_bar, double flow, double weymouth_k);

// Exact flow for a given squared-pressure drop (used by dispatch reporting
// and by test oracles' bisection cross-checks).
double weymouth_flow(double p_from_bar, double p_to_bar, double weymouth_k);

struct Box {
    double x_lo = 0.0, x_hi = 0.0;
    double y_lo = 0.0, y_hi = 0.0;
};

// Four-inequality convex hull of w = x*y on the box, expressed over the
// given solver variable indices. Degenerate boxes are a validation error.
std::array<solver::Row, 4> mccormick(const Box& box, int x_var, int y_var, int w_var);

// K * f^2 <= pi_from - pi_to over squared-pressure variables; convex, so it
// feeds the solver's outer-approximation cut machinery.
class WeymouthCone : public solver::ConvexConstraint {
public:
    WeymouthCone(int flow_var, int pi_from_var, int pi_to_var, double weymouth_k)
        : f_(flow_var), pf_(pi_from_var), pt_(pi_to_var), k_(weymouth_k) {}
    double eval(const std::vector<double>& x) const override {
        return k_ * x[f_] * x[f_] - x[pf_] + x[pt_];
    }
    std::vector<std::pair<int, double>> grad(const std::vector<double>& x) const override {
        return {{f_, 2.0 * k_ * x[f_]}, {pf_, -1.0}, {pt_, 1.0}};
    }
    std::string name() const override { return "weymouth_soc"; }

private:
    int f_, pf_, pt_;
    double k_;
};

} // namespace h2::gas
