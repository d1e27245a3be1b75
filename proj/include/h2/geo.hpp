#pragma once
#include <cstdint>
#include <string>
#include <vector>

// Spatial grid, exclusion geometry, great-circle distances and synthetic
// weather series. Everything here is pure given its inputs; cells are
// immutable after load apart from the exclusion flag.

namespace h2::geo {

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

struct GridCell {
    int id = 0;
    double lat = 0.0, lon = 0.0;
    std::string country;
    double depth_m = 0.0;          // positive = water depth
    double vessel_density = 0.0;   // vessels/km^2/year (raw, normalised later)
    double area_km2 = 0.0;
    bool excluded = false;
    std::string wind_series_ref;   // empty -> synthesised from the run seed
};

struct Polygon {
    std::vector<LatLon> vertices;
    void validate() const; // >=3 vertices, non-self-intersecting
    // Ray casting with boundary points counting as inside.
    bool contains(const LatLon& p) const;
};

struct WindSeries {
    std::vector<double> speed_ms;       // hourly, hub height
    std::vector<double> direction_deg;  // from north, [0, 360)
    std::size_t hours() const { return speed_ms.size(); }
};

struct Port {
    std::string name;
    LatLon pos;
};

struct PortSet {
    std::vector<Port> ports;
    std::vector<Port> connection_points;
};

// CSV `id,lat,lon,country,depth,vessel_density,area`. Parse errors name the
// offending line; duplicate ids are rejected.
std::vector<GridCell> load_grid(const std::string& path);

// JSON array of polygons: [[[lat,lon],...], ...]
std::vector<Polygon> load_zones(const std::string& path);

// JSON {"ports":[{"name","lat","lon"},...], "connection_points":[...]}
PortSet load_ports(const std::string& path);

// Marks cells whose centre lies inside any zone. Idempotent.
void apply_exclusions(std::vector<GridCell>& cells, const std::vector<Polygon>& zones);

// Great-circle distance, Earth radius 6371.0 km.
double haversine_km(const LatLon& a, const LatLon& b);

double nearest_km(const LatLon& p, const std::vector<Port>& ports);

// Deterministic Weibull(k, lambda) speeds with uniform directions.
WindSeries synth_wind(std::uint64_t seed, double weibull_k, double weibull_lambda_ms, int hours);

} // namespace h2::geo
