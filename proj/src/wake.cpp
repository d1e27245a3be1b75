#include "h2/wake.hpp"
#include "h2/csv.hpp"
#include "h2/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace h2::wake {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

PowerCurve PowerCurve::from_table(std::vector<double> speed, std::vector<double> power,
                                  std::vector<double> ct, double rotor_diameter_m) {
    PowerCurve c;
    c.speed_ms = std::move(speed);
    c.power_mw = std::move(power);
    c.ct = std::move(ct);
    c.rotor_diameter_m = rotor_diameter_m;
    c.rated_mw = 0.0;
    c.cut_in = -1.0;
    c.cut_out = -1.0;
    for (std::size_t i = 0; i < c.speed_ms.size(); ++i) {
        if (c.power_mw[i] > 0.0) {
            if (c.cut_in < 0.0) c.cut_in = c.speed_ms[i];
            c.cut_out = c.speed_ms[i];
            c.rated_mw = std::max(c.rated_mw, c.power_mw[i]);
        }
    }
    c.validate();
    return c;
}

PowerCurve PowerCurve::from_csv(const std::string& path, double rotor_diameter_m) {
    const auto t = csv::read_file(path);
    const int cs = t.column("speed"), cp = t.column("power"), cc = t.column("ct");
    if (cs < 0 || cp < 0 || cc < 0)
        throw InputError(path + ": power curve CSV needs columns speed,power,ct");
    std::vector<double> speed, power, ct;
    int line = 1;
    for (const auto& row : t.rows) {
        ++line;
        speed.push_back(csv::parse_double(row[cs], path, line, "speed"));
        power.push_back(csv::parse_double(row[cp], path, line, "power"));
        ct.push_back(csv::parse_double(row[cc], path, line, "ct"));
    }
    return from_table(std::move(speed), std::move(power), std::move(ct), rotor_diameter_m);
}

void PowerCurve::validate() const {
    if (speed_ms.size() < 2 || speed_ms.size() != power_mw.size() || speed_ms.size() != ct.size())
        throw ValidationError("power curve: inconsistent table sizes");
    for (std::size_t i = 1; i < speed_ms.size(); ++i)
        if (speed_ms[i] <= speed_ms[i - 1])
            throw ValidationError("power curve: speeds must be strictly increasing");
    if (rated_mw <= 0.0) throw ValidationError("power curve: no positive power entries");
    if (rotor_diameter_m <= 0.0) throw ValidationError("power curve: rotor diameter must be positive");
    for (std::size_t i = 0; i < speed_ms.size(); ++i) {
        if (power_mw[i] < 0.0 || power_mw[i] > rated_mw + 1e-9)
            throw ValidationError("power curve: power outside [0, rated]");
        const bool operating = speed_ms[i] >= cut_in && speed_ms[i] <= cut_out && power_mw[i] > 0.0;
        if (operating && (ct[i] <= 0.0 || ct[i] >= 1.0))
            throw ValidationError("power curve: Ct must lie in (0,1) over the operating range");
    }
}

static double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double f = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + f * (ys[hi] - ys[lo]);
}

double PowerCurve::power_at(double speed) const {
    if (speed < cut_in || speed > cut_out) return 0.0;
    return interp(speed_ms, power_mw, speed);
}

double PowerCurve::ct_at(double speed) const {
    if (speed < cut_in || speed > cut_out) return 0.0;
    return interp(speed_ms, ct, speed);
}

double PowerCurve::max_ct() const {
    double m = 0.0;
    for (std::size_t i = 0; i < speed_ms.size(); ++i)
        if (speed_ms[i] >= cut_in && speed_ms[i] <= cut_out) m = std::max(m, ct[i]);
    return m;
}

Layout Layout::from_csv(const std::string& path) {
    const auto t = csv::read_file(path);
    const int cx = t.column("x"), cy = t.column("y");
    if (cx < 0 || cy < 0) throw InputError(path + ": layout CSV needs columns x,y");
    Layout l;
    int line = 1;
    for (const auto& row : t.rows) {
        ++line;
        l.pos_m.push_back({csv::parse_double(row[cx], path, line, "x"),
                           csv::parse_double(row[cy], path, line, "y")});
    }
    return l;
}

Layout Layout::grid(int rows, int cols, double spacing_m) {
    Layout l;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            l.pos_m.push_back({c * spacing_m, r * spacing_m});
    return l;
}

void Layout::validate(double rotor_diameter_m) const {
    for (std::size_t i = 0; i < pos_m.size(); ++i) {
        for (std::size_t j = i + 1; j < pos_m.size(); ++j) {
            const double dx = pos_m[i][0] - pos_m[j][0];
            const double dy = pos_m[i][1] - pos_m[j][1];
            if (std::hypot(dx, dy) < rotor_diameter_m - 1e-9)
                throw ValidationError("layout: turbines closer than one rotor diameter");
        }
    }
}

std::size_t WakeGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& e : incoming) n += e.size();
    return n;
}

double single_wake_deficit(double axial_m, double cross_m, double ct, double rotor_diameter_m,
                           double decay_k) {
    if (ct <= 0.0 || ct >= 1.0) throw ValidationError("wake deficit: Ct must lie in (0,1)");
    if (axial_m <= 0.0) return 0.0;
    const double d = rotor_diameter_m;
    const double expand = 1.0 + 2.0 * decay_k * axial_m / d;
    const double axial_term = (1.0 - std::sqrt(1.0 - ct)) / (expand * expand);
    const double sigma = (d + 2.0 * decay_k * axial_m) / 4.0;
    const double radial = std::exp(-(cross_m * cross_m) / (2.0 * sigma * sigma));
    return axial_term * radial;
}

namespace {

// Downwind/crosswind decomposition. wind_direction is where the wind comes
// from (degrees from north), so the flow vector points the opposite way.
struct FlowFrame {
    double dx, dy; // downwind unit vector (east, north)

    explicit FlowFrame(double wind_direction_deg) {
        const double th = wind_direction_deg * kPi / 180.0;
        dx = -std::sin(th);
        dy = -std::cos(th);
    }
    double axial(const std::array<double, 2>& p) const { return p[0] * dx + p[1] * dy; }
    double cross(const std::array<double, 2>& p) const { return -p[0] * dy + p[1] * dx; }
};

} // namespace

double single_wake_deficit(const std::array<double, 2>& upstream, const std::array<double, 2>& downstream,
                           double wind_direction_deg, double ct, double rotor_diameter_m, double decay_k) {
    const FlowFrame f(wind_direction_deg);
    const std::array<double, 2> rel{downstream[0] - upstream[0], downstream[1] - upstream[1]};
    return single_wake_deficit(f.axial(rel), f.cross(rel), ct, rotor_diameter_m, decay_k);
}

WakeGraph build_wake_tree(const Layout& layout, double wind_direction_deg, const PowerCurve& curve,
                          const FarmOptions& opts) {
    const int n = layout.size();
    WakeGraph g;
    g.direction_deg = wind_direction_deg;
    g.incoming.resize(n);
    const FlowFrame f(wind_direction_deg);
    std::vector<double> ax(n), cr(n);
    for (int i = 0; i < n; ++i) {
        ax[i] = f.axial(layout.pos_m[i]);
        cr[i] = f.cross(layout.pos_m[i]);
    }
    g.order.resize(n);
    std::iota(g.order.begin(), g.order.end(), 0);
    std::sort(g.order.begin(), g.order.end(), [&](int a, int b) {
        if (ax[a] != ax[b]) return ax[a] < ax[b];
        return a < b;
    });
    const double ct_max = curve.max_ct();
    const double d_rotor = curve.rotor_diameter_m;
    for (int vi = 0; vi < n; ++vi) {
        const int v = g.order[vi];
        for (int ui = 0; ui < vi; ++ui) {
            const int u = g.order[ui];
            const double dxm = ax[v] - ax[u];
            if (dxm <= 0.0) continue; // same axial station: no interaction
            const double dcm = cr[v] - cr[u];
            if (single_wake_deficit(dxm, dcm, ct_max, d_rotor, opts.decay_k) >
                opts.influence_cutoff) {
                const double expand = 1.0 + 2.0 * opts.decay_k * dxm / d_rotor;
                const double sigma = (d_rotor + 2.0 * opts.decay_k * dxm) / 4.0;
                const double geom =
                    std::exp(-(dcm * dcm) / (2.0 * sigma * sigma)) / (expand * expand);
                g.incoming[v].push_back({u, dxm, dcm, geom});
            }
        }
    }
    return g;
}

std::vector<double> effective_speeds(const WakeGraph& graph, const PowerCurve& curve, double free_speed_ms,
                                     const FarmOptions& opts) {
    (void)opts; // decay constant is baked into the cached edge geometry
    const int n = static_cast<int>(graph.incoming.size());
    std::vector<double> speed(n, free_speed_ms);
    if (free_speed_ms <= 0.0) return speed;
    // thrust term 1 - sqrt(1 - Ct(s_u)) depends only on the upstream turbine,
    // so it is evaluated once per turbine and reused across its wake edges
    std::vector<double> thrust(n, 0.0);
    for (int v : graph.order) {
        double sum_sq = 0.0;
        for (const WakeEdge& e : graph.incoming[v]) {
            const double du = thrust[e.upstream] * e.geom_factor * speed[e.upstream] / free_speed_ms;
            sum_sq += du * du;
        }
        const double deficit = std::min(1.0, std::sqrt(sum_sq));
        speed[v] = free_speed_ms * (1.0 - deficit);
        const double ct = curve.ct_at(speed[v]);
        thrust[v] = ct > 0.0 ? 1.0 - std::sqrt(1.0 - ct) : 0.0;
    }
    return speed;
}

std::vector<double> farm_power(const Layout& layout, const PowerCurve& curve, const geo::WindSeries& series,
                               const FarmOptions& opts) {
    if (series.hours() == 0) throw ValidationError("farm_power: empty wind series");
    std::map<long, WakeGraph> graphs; // keyed by direction bin
    std::vector<double> out;
    out.reserve(series.hours());
    for (std::size_t t = 0; t < series.hours(); ++t) {
        const double dir = series.direction_deg[t];
        const long bin = std::lround(dir / opts.direction_bin_deg);
        auto it = graphs.find(bin);
        if (it == graphs.end()) {
            const double bin_centre = bin * opts.direction_bin_deg;
            it = graphs.emplace(bin, build_wake_tree(layout, bin_centre, curve, opts)).first;
        }
        const auto speeds = effective_speeds(it->second, curve, series.speed_ms[t], opts);
        double p = 0.0;
        for (double s : speeds) p += curve.power_at(s);
        out.push_back(p);
    }
    return out;
}

double capacity_factor(const std::vector<double>& power_mw, double rated_mw) {
    if (rated_mw <= 0.0) throw ValidationError("capacity factor: rated power must be positive");
    if (power_mw.empty()) return 0.0;
    double sum = 0.0;
    for (double p : power_mw) sum += p;
    return sum / (rated_mw * static_cast<double>(power_mw.size()));
}

double min_spacing(const PowerCurve& curve, double decay_k, double threshold) {
    if (threshold <= 0.0 || threshold >= 1.0)
        throw ValidationError("min_spacing: threshold must lie in (0,1)");
    const double ct = curve.max_ct();
    const double at_rotor = 1.0 - std::sqrt(1.0 - ct);
    if (threshold >= at_rotor) return 0.0; // already satisfied at the rotor plane
    double lo = 0.0, hi = curve.rotor_diameter_m;
    while (single_wake_deficit(hi, 0.0, ct, curve.rotor_diameter_m, decay_k) > threshold) hi *= 2.0;
    while (hi - lo > 1.0) {
        const double mid = 0.5 * (lo + hi);
        if (single_wake_deficit(mid, 0.0, ct, curve.rotor_diameter_m, decay_k) > threshold) lo = mid;
        else hi = mid;
    }
    return hi;
}

} // namespace h2::wake
