#pragma once
#include "h2/geo.hpp"

#include <array>
#include <string>
#include <vector>

// Wake-corrected farm power. The single-wake model is a Jensen axial decay
// with a Gaussian radial profile:
//
//   deficit(x, r) = (1 - sqrt(1 - Ct)) / (1 + 2 k x / D)^2 * exp(-r^2 / (2 sigma^2))
//   sigma(x) = (D + 2 k x) / 4
//
// Cumulative wakes combine by root-sum-of-squares of the per-edge speed
// deficits, each edge evaluated at the upstream turbine's own waked speed
// (both its Ct and the deficit magnitude scale with that speed).

namespace h2::wake {

struct PowerCurve {
    std::vector<double> speed_ms;  // strictly increasing
    std::vector<double> power_mw;
    std::vector<double> ct;
    double cut_in = 0.0, cut_out = 0.0; // derived from the table on load
    double rated_mw = 0.0;
    double rotor_diameter_m = 0.0;

    // CSV `speed,power,ct`; cut-in/cut-out/rated derived from the table.
    static PowerCurve from_csv(const std::string& path, double rotor_diameter_m);
    static PowerCurve from_table(std::vector<double> speed, std::vector<double> power,
                                 std::vector<double> ct, double rotor_diameter_m);

    void validate() const;
    double power_at(double speed) const; // 0 outside [cut_in, cut_out], linear inside
    double ct_at(double speed) const;    // 0 outside the operating range
    double max_ct() const;
};

struct Layout {
    std::vector<std::array<double, 2>> pos_m; // x east, y north, local tangent plane

    static Layout from_csv(const std::string& path);
    static Layout grid(int rows, int cols, double spacing_m);
    void validate(double rotor_diameter_m) const; // pairwise distance >= 1 D
    int size() const { return static_cast<int>(pos_m.size()); }
};

struct WakeEdge {
    int upstream = 0;
    double axial_m = 0.0;      // downwind separation, > 0
    double cross_m = 0.0;      // crosswind offset
    double geom_factor = 0.0;  // exp(-r^2/2sigma^2) / (1 + 2kx/D)^2, speed-independent
};

// Direction-specific DAG; `order` is upstream-first by axial coordinate.
struct WakeGraph {
    double direction_deg = 0.0;
    std::vector<int> order;
    std::vector<std::vector<WakeEdge>> incoming; // per turbine
    std::size_t edge_count() const;
};

struct FarmOptions {
    double decay_k = 0.05;          // offshore default
    double influence_cutoff = 1e-3; // edges below this worst-case deficit are pruned
    double direction_bin_deg = 1.0; // graph reuse bin width
};

// Fractional speed deficit at (axial, cross) metres downwind of a rotor.
// Zero when axial <= 0. Ct outside (0,1) is a validation error.
double single_wake_deficit(double axial_m, double cross_m, double ct, double rotor_diameter_m,
                           double decay_k);

// Geometric overload: positions in the layout plane, wind direction in
// degrees from north (direction the wind comes from).
double single_wake_deficit(const std::array<double, 2>& upstream, const std::array<double, 2>& downstream,
                           double wind_direction_deg, double ct, double rotor_diameter_m, double decay_k);

// Edge u->v present iff the worst-case (max-Ct) deficit exceeds the cutoff.
WakeGraph build_wake_tree(const Layout& layout, double wind_direction_deg, const PowerCurve& curve,
                          const FarmOptions& opts = {});

// Waked speed per turbine for one free-stream speed.
std::vector<double> effective_speeds(const WakeGraph& graph, const PowerCurve& curve, double free_speed_ms,
                                     const FarmOptions& opts = {});

// Hourly farm output; wake graphs are built per direction bin and reused.
std::vector<double> farm_power(const Layout& layout, const PowerCurve& curve, const geo::WindSeries& series,
                               const FarmOptions& opts = {});

double capacity_factor(const std::vector<double>& power_mw, double rated_mw);

// Smallest inline spacing whose on-axis worst-case deficit is <= threshold
// (bisection, 1 m tolerance).
double min_spacing(const PowerCurve& curve, double decay_k, double threshold);

} // namespace h2::wake
