#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "h2/errors.hpp"
#include "h2/geo.hpp"
#include "h2/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

using namespace h2;
using namespace h2::geo;

namespace {

std::string write_tmp(const std::string& name, const std::string& content) {
    std::filesystem::create_directories("test_tmp");
    const std::string path = "test_tmp/" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

// Independent point-in-polygon oracle: winding number via accumulated angles.
bool winding_contains(const Polygon& poly, const LatLon& p) {
    double total = 0.0;
    const std::size_t n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const LatLon& a = poly.vertices[i];
        const LatLon& b = poly.vertices[(i + 1) % n];
        const double ax = a.lon - p.lon, ay = a.lat - p.lat;
        const double bx = b.lon - p.lon, by = b.lat - p.lat;
        total += std::atan2(ax * by - ay * bx, ax * bx + ay * by);
    }
    return std::abs(total) > 3.0; // ~2*pi inside, ~0 outside
}

// Alternate-formula distance oracle (spherical law of cosines).
double slc_km(const LatLon& a, const LatLon& b) {
    const double d2r = 3.14159265358979323846 / 180.0;
    const double phi1 = a.lat * d2r, phi2 = b.lat * d2r;
    const double dl = (b.lon - a.lon) * d2r;
    double c = std::sin(phi1) * std::sin(phi2) + std::cos(phi1) * std::cos(phi2) * std::cos(dl);
    c = std::clamp(c, -1.0, 1.0);
    return 6371.0 * std::acos(c);
}

double weibull_cdf(double x, double k, double lam) {
    return 1.0 - std::exp(-std::pow(x / lam, k));
}

} // namespace

TEST_CASE("load_grid: identity load of a valid file") {
    const auto p = write_tmp("grid_ok.csv",
                             "id,lat,lon,country,depth,vessel_density,area\n"
                             "1,53.0,-6.0,IE,25.0,0.1,900\n"
                             "7,52.5,-6.5,IE,45.0,0.0,900\n");
    auto cells = load_grid(p);
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].id == 1);
    CHECK(cells[1].id == 7);
    CHECK(cells[1].depth_m == doctest::Approx(45.0));
    CHECK(!cells[0].excluded);
}

TEST_CASE("load_grid: malformed depth names the line") {
    const auto p = write_tmp("grid_bad.csv",
                             "id,lat,lon,country,depth,vessel_density,area\n"
                             "1,53.0,-6.0,IE,abc,0.1,900\n");
    try {
        load_grid(p);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
}

TEST_CASE("load_grid: header-only file gives empty list") {
    const auto p = write_tmp("grid_empty.csv", "id,lat,lon,country,depth,vessel_density,area\n");
    CHECK(load_grid(p).empty());
}

TEST_CASE("load_grid: duplicate id rejected") {
    const auto p = write_tmp("grid_dup.csv",
                             "id,lat,lon,country,depth,vessel_density,area\n"
                             "1,53.0,-6.0,IE,25.0,0.1,900\n"
                             "1,52.5,-6.5,IE,45.0,0.0,900\n");
    CHECK_THROWS_AS(load_grid(p), InputError);
}

TEST_CASE("apply_exclusions: empty zone list is a no-op") {
    std::vector<GridCell> cells(3);
    for (int i = 0; i < 3; ++i) { cells[i].id = i; cells[i].lat = 50 + i; cells[i].lon = 0; }
    apply_exclusions(cells, {});
    for (auto& c : cells) CHECK(!c.excluded);
}

TEST_CASE("apply_exclusions: centroid of a square zone is excluded") {
    Polygon sq;
    sq.vertices = {{50, 0}, {50, 2}, {52, 2}, {52, 0}};
    std::vector<GridCell> cells(1);
    cells[0].lat = 51;
    cells[0].lon = 1;
    apply_exclusions(cells, {sq});
    CHECK(cells[0].excluded);
}

TEST_CASE("apply_exclusions: boundary counts as inside") {
    Polygon sq;
    sq.vertices = {{50, 0}, {50, 2}, {52, 2}, {52, 0}};
    CHECK(sq.contains({50.0, 1.0}));
    CHECK(sq.contains({50.0, 0.0}));
}

TEST_CASE("apply_exclusions: random cells vs winding-number oracle") {
    Rng rng(4242);
    for (int zone_trial = 0; zone_trial < 3; ++zone_trial) {
        // random convex polygon: points on a circle
        Polygon z;
        const double clat = rng.uniform(48, 56), clon = rng.uniform(-8, 2);
        const double r = rng.uniform(0.5, 2.0);
        const int nv = 5 + static_cast<int>(rng.next_below(4));
        for (int i = 0; i < nv; ++i) {
            const double th = 2 * 3.14159265358979 * i / nv;
            z.vertices.push_back({clat + r * std::sin(th), clon + r * std::cos(th)});
        }
        std::vector<GridCell> cells(10);
        for (auto& c : cells) {
            c.lat = rng.uniform(47, 57);
            c.lon = rng.uniform(-9, 3);
        }
        auto copy = cells;
        apply_exclusions(copy, {z});
        for (std::size_t i = 0; i < cells.size(); ++i) {
            CHECK(copy[i].excluded == winding_contains(z, {cells[i].lat, cells[i].lon}));
        }
    }
}

TEST_CASE("apply_exclusions is idempotent") {
    Polygon sq;
    sq.vertices = {{50, 0}, {50, 2}, {52, 2}, {52, 0}};
    std::vector<GridCell> cells(5);
    Rng rng(7);
    for (auto& c : cells) { c.lat = rng.uniform(49, 53); c.lon = rng.uniform(-1, 3); }
    auto once = cells;
    apply_exclusions(once, {sq});
    auto twice = once;
    apply_exclusions(twice, {sq});
    for (std::size_t i = 0; i < cells.size(); ++i) CHECK(once[i].excluded == twice[i].excluded);
}

TEST_CASE("polygon validation") {
    Polygon two;
    two.vertices = {{0, 0}, {1, 1}};
    CHECK_THROWS_AS(two.validate(), ValidationError);
    Polygon bowtie;
    bowtie.vertices = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    CHECK_THROWS_AS(bowtie.validate(), ValidationError);
}

TEST_CASE("haversine: identity and antipodal half-circumference") {
    CHECK(haversine_km({53.3, -6.2}, {53.3, -6.2}) == doctest::Approx(0.0));
    CHECK(haversine_km({0, 0}, {0, 180}) == doctest::Approx(3.14159265358979 * 6371.0).epsilon(1e-9));
}

TEST_CASE("haversine vs spherical-law-of-cosines oracle") {
    const LatLon dublin{53.35, -6.26}, london{51.51, -0.13};
    CHECK(std::abs(haversine_km(dublin, london) - slc_km(dublin, london)) < 0.1);
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        LatLon a{rng.uniform(-80, 80), rng.uniform(-180, 180)};
        LatLon b{rng.uniform(-80, 80), rng.uniform(-180, 180)};
        CHECK(std::abs(haversine_km(a, b) - slc_km(a, b)) < 0.5);
    }
}

TEST_CASE("haversine: symmetry and triangle inequality on sampled triples") {
    Rng rng(13);
    for (int i = 0; i < 100; ++i) {
        LatLon a{rng.uniform(-85, 85), rng.uniform(-180, 180)};
        LatLon b{rng.uniform(-85, 85), rng.uniform(-180, 180)};
        LatLon c{rng.uniform(-85, 85), rng.uniform(-180, 180)};
        CHECK(haversine_km(a, b) == doctest::Approx(haversine_km(b, a)));
        CHECK(haversine_km(a, c) <= haversine_km(a, b) + haversine_km(b, c) + 1e-9);
    }
}

TEST_CASE("synth_wind: determinism and validation") {
    auto a = synth_wind(42, 2.0, 10.0, 100);
    auto b = synth_wind(42, 2.0, 10.0, 100);
    CHECK(a.speed_ms == b.speed_ms);
    CHECK(a.direction_deg == b.direction_deg);
    CHECK_THROWS_AS(synth_wind(1, 2.0, 10.0, 0), ValidationError);
    CHECK_THROWS_AS(synth_wind(1, -1.0, 10.0, 10), ValidationError);
    CHECK_THROWS_AS(synth_wind(1, 2.0, 0.0, 10), ValidationError);
    for (double d : a.direction_deg) {
        CHECK(d >= 0.0);
        CHECK(d < 360.0);
    }
}

TEST_CASE("synth_wind: sample mean near the Weibull mean") {
    // k=2, lambda=10 -> mean = lambda * Gamma(1.5) = 10*sqrt(pi)/2
    const double expected = 10.0 * std::sqrt(3.14159265358979323846) / 2.0;
    auto s = synth_wind(7, 2.0, 10.0, 100000);
    double sum = 0.0;
    for (double v : s.speed_ms) sum += v;
    const double mean = sum / static_cast<double>(s.hours());
    CHECK(std::abs(mean - expected) / expected < 0.01);
}

TEST_CASE("synth_wind: Kolmogorov-Smirnov fit at alpha=0.01") {
    const double k = 2.3, lam = 9.0;
    const int n = 20000;
    auto s = synth_wind(123, k, lam, n);
    std::vector<double> v = s.speed_ms;
    std::sort(v.begin(), v.end());
    double dmax = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = weibull_cdf(v[i], k, lam);
        dmax = std::max(dmax, std::abs(f - (i + 1.0) / n));
        dmax = std::max(dmax, std::abs(f - static_cast<double>(i) / n));
    }
    const double crit = 1.628 / std::sqrt(static_cast<double>(n)); // alpha = 0.01
    CHECK(dmax < crit);
}
