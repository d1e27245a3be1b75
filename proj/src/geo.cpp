#include "h2/geo.hpp"
#include "h2/csv.hpp"
#include "h2/errors.hpp"
#include "h2/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>

namespace h2::geo {

namespace {

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kDeg2Rad = 3.14159265358979323846 / 180.0;

// orientation of the triple (a,b,c): >0 counter-clockwise, <0 clockwise
double cross(const LatLon& a, const LatLon& b, const LatLon& c) {
    return (b.lon - a.lon) * (c.lat - a.lat) - (b.lat - a.lat) * (c.lon - a.lon);
}

bool on_segment(const LatLon& a, const LatLon& b, const LatLon& p) {
    if (std::abs(cross(a, b, p)) > 1e-12) return false;
    return p.lat >= std::min(a.lat, b.lat) - 1e-12 && p.lat <= std::max(a.lat, b.lat) + 1e-12 &&
           p.lon >= std::min(a.lon, b.lon) - 1e-12 && p.lon <= std::max(a.lon, b.lon) + 1e-12;
}

bool segments_intersect(const LatLon& p1, const LatLon& p2, const LatLon& q1, const LatLon& q2) {
    const double d1 = cross(q1, q2, p1);
    const double d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1);
    const double d4 = cross(p1, p2, q2);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
           ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

} // namespace

void Polygon::validate() const {
    const std::size_t n = vertices.size();
    if (n < 3) throw ValidationError("polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // adjacent edges share an endpoint; skip those pairs
            if (j == i || j == (i + 1) % n || (j + 1) % n == i) continue;
            if (segments_intersect(vertices[i], vertices[(i + 1) % n],
                                   vertices[j], vertices[(j + 1) % n]))
                throw ValidationError("polygon is self-intersecting");
        }
    }
}

bool Polygon::contains(const LatLon& p) const {
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i)
        if (on_segment(vertices[i], vertices[(i + 1) % n], p)) return true; // boundary is inside
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const LatLon& vi = vertices[i];
        const LatLon& vj = vertices[j];
        const bool crosses = (vi.lat > p.lat) != (vj.lat > p.lat);
        if (crosses) {
            const double x = vj.lon + (p.lat - vj.lat) / (vi.lat - vj.lat) * (vi.lon - vj.lon);
            if (p.lon < x) inside = !inside;
        }
    }
    return inside;
}

std::vector<GridCell> load_grid(const std::string& path) {
    const auto t = csv::read_file(path);
    const int c_id = t.column("id"), c_lat = t.column("lat"), c_lon = t.column("lon");
    const int c_country = t.column("country"), c_depth = t.column("depth");
    const int c_vd = t.column("vessel_density"), c_area = t.column("area");
    if (c_id < 0 || c_lat < 0 || c_lon < 0 || c_country < 0 || c_depth < 0 || c_vd < 0 || c_area < 0)
        throw InputError(path + ": grid CSV must have columns id,lat,lon,country,depth,vessel_density,area");
    const int c_ref = t.column("wind_series_ref"); // optional

    std::vector<GridCell> cells;
    std::set<int> seen;
    int line = 1;
    for (const auto& row : t.rows) {
        ++line;
        if (static_cast<int>(row.size()) <= std::max({c_id, c_lat, c_lon, c_country, c_depth, c_vd, c_area}))
            throw InputError(path + ":" + std::to_string(line) + ": too few columns");
        GridCell c;
        c.id = static_cast<int>(csv::parse_int(row[c_id], path, line, "id"));
        c.lat = csv::parse_double(row[c_lat], path, line, "lat");
        c.lon = csv::parse_double(row[c_lon], path, line, "lon");
        c.country = row[c_country];
        c.depth_m = csv::parse_double(row[c_depth], path, line, "depth");
        c.vessel_density = csv::parse_double(row[c_vd], path, line, "vessel_density");
        c.area_km2 = csv::parse_double(row[c_area], path, line, "area");
        if (c_ref >= 0 && c_ref < static_cast<int>(row.size())) c.wind_series_ref = row[c_ref];
        if (c.depth_m <= 0.0)
            throw InputError(path + ":" + std::to_string(line) + ": offshore cell needs depth > 0");
        if (c.area_km2 <= 0.0)
            throw InputError(path + ":" + std::to_string(line) + ": cell area must be > 0");
        if (!seen.insert(c.id).second)
            throw InputError(path + ":" + std::to_string(line) + ": duplicate cell id " + std::to_string(c.id));
        cells.push_back(std::move(c));
    }
    return cells;
}

std::vector<Polygon> load_zones(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open zones file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    if (!j.is_array()) throw InputError(path + ": expected a JSON array of polygons");
    std::vector<Polygon> zones;
    for (const auto& poly : j) {
        Polygon p;
        for (const auto& v : poly) {
            if (!v.is_array() || v.size() != 2)
                throw InputError(path + ": polygon vertex must be [lat, lon]");
            p.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
        }
        p.validate();
        zones.push_back(std::move(p));
    }
    return zones;
}

PortSet load_ports(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open ports file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    auto parse_list = [&](const char* key) {
        std::vector<Port> out;
        if (!j.contains(key)) return out;
        for (const auto& e : j[key])
            out.push_back({e.value("name", std::string("?")),
                           {e.at("lat").get<double>(), e.at("lon").get<double>()}});
        return out;
    };
    PortSet ps;
    ps.ports = parse_list("ports");
    ps.connection_points = parse_list("connection_points");
    return ps;
}

void apply_exclusions(std::vector<GridCell>& cells, const std::vector<Polygon>& zones) {
    for (auto& z : zones) z.validate();
    for (auto& c : cells) {
        if (c.excluded) continue; // already out; zones never re-admit a cell
        const LatLon p{c.lat, c.lon};
        for (const auto& z : zones) {
            if (z.contains(p)) {
                c.excluded = true;
                break;
            }
        }
    }
}

double haversine_km(const LatLon& a, const LatLon& b) {
    const double phi1 = a.lat * kDeg2Rad, phi2 = b.lat * kDeg2Rad;
    const double dphi = (b.lat - a.lat) * kDeg2Rad;
    const double dlam = (b.lon - a.lon) * kDeg2Rad;
    const double s1 = std::sin(dphi / 2.0), s2 = std::sin(dlam / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double nearest_km(const LatLon& p, const std::vector<Port>& ports) {
    if (ports.empty()) throw ValidationError("no ports given for distance computation");
    double best = haversine_km(p, ports.front().pos);
    for (std::size_t i = 1; i < ports.size(); ++i)
        best = std::min(best, haversine_km(p, ports[i].pos));
    return best;
}

WindSeries synth_wind(std::uint64_t seed, double weibull_k, double weibull_lambda_ms, int hours) {
    if (weibull_k <= 0.0 || weibull_lambda_ms <= 0.0)
        throw ValidationError("Weibull parameters must be positive");
    if (hours < 1) throw ValidationError("wind series needs at least one hour");
    Rng rng(seed);
    WindSeries s;
    s.speed_ms.reserve(hours);
    s.direction_deg.reserve(hours);
    for (int t = 0; t < hours; ++t) {
        // inverse-CDF sample; 1-u avoids log(0)
        const double u = rng.next_double();
        s.speed_ms.push_back(weibull_lambda_ms * std::pow(-std::log1p(-u), 1.0 / weibull_k));
        s.direction_deg.push_back(rng.next_double() * 360.0);
    }
    return s;
}

} // namespace h2::geo
