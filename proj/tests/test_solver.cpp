#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "h2/rng.hpp"
#include "h2/errors.hpp"
#include "h2/solver.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace h2;
using namespace h2::solver;

namespace {

// Independent 2-variable oracle: enumerate all pairwise constraint
// intersections (including bounds as constraints), keep feasible points,
// maximise/minimise directly.
struct HalfPlane {
    double a, b, rhs; // a*x + b*y <= rhs
};

double vertex_enum_max(const std::vector<HalfPlane>& hp, double cx, double cy) {
    double best = -kInf;
    const int k = static_cast<int>(hp.size());
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            const double det = hp[i].a * hp[j].b - hp[j].a * hp[i].b;
            if (std::abs(det) < 1e-12) continue;
            const double x = (hp[i].rhs * hp[j].b - hp[j].rhs * hp[i].b) / det;
            const double y = (hp[i].a * hp[j].rhs - hp[j].a * hp[i].rhs) / det;
            bool feas = true;
            for (auto& h : hp)
                if (h.a * x + h.b * y > h.rhs + 1e-9) feas = false;
            if (feas) best = std::max(best, cx * x + cy * y);
        }
    }
    return best;
}

// dual objective for a minimisation LP with bounds: b'y + sum_j d_j * (active bound)
double dual_objective(const LinearProgram& lp, const Solution& s) {
    double v = 0.0;
    for (std::size_t i = 0; i < lp.rows.size(); ++i) v += lp.rows[i].rhs * s.duals[i];
    for (int j = 0; j < lp.num_vars(); ++j) {
        const double d = s.reduced_costs[j];
        if (d > 1e-9) v += d * lp.lower[j];
        else if (d < -1e-9) v += d * lp.upper[j];
    }
    return v;
}

struct QuadBall : ConvexConstraint {
    // g(x) = x_j^2 - r2 <= 0
    int j;
    double r2;
    QuadBall(int j_, double r2_) : j(j_), r2(r2_) {}
    double eval(const std::vector<double>& x) const override { return x[j] * x[j] - r2; }
    std::vector<std::pair<int, double>> grad(const std::vector<double>& x) const override {
        return {{j, 2.0 * x[j]}};
    }
};

} // namespace

TEST_CASE("simplex: one-variable maximum") {
    LinearProgram lp;
    lp.maximize = true;
    lp.add_var(0.0, kInf, 1.0);
    lp.add_row({{0, 1.0}}, Sense::LE, 1.0);
    auto s = simplex_solve(lp);
    CHECK(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(1.0));
    CHECK(s.values[0] == doctest::Approx(1.0));
}

TEST_CASE("simplex: contradictory constraints are infeasible") {
    LinearProgram lp;
    lp.add_var(-kInf, kInf, 1.0);
    lp.add_row({{0, 1.0}}, Sense::LE, 0.0);
    lp.add_row({{0, 1.0}}, Sense::GE, 1.0);
    auto s = simplex_solve(lp);
    CHECK(s.status == Status::Infeasible);
}

TEST_CASE("simplex: 2-var LP matches vertex enumeration oracle") {
    LinearProgram lp;
    lp.maximize = true;
    lp.add_var(0.0, kInf, 3.0);
    lp.add_var(0.0, kInf, 2.0);
    lp.add_row({{0, 1.0}, {1, 1.0}}, Sense::LE, 4.0);
    lp.add_row({{0, 1.0}, {1, 3.0}}, Sense::LE, 6.0);
    auto s = simplex_solve(lp);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(12.0));
    CHECK(s.values[0] == doctest::Approx(4.0));
    CHECK(s.values[1] == doctest::Approx(0.0));

    std::vector<HalfPlane> hp = {
        {1, 1, 4}, {1, 3, 6}, {-1, 0, 0}, {0, -1, 0}};
    CHECK(vertex_enum_max(hp, 3.0, 2.0) == doctest::Approx(12.0));
}

TEST_CASE("simplex: unbounded ray detected") {
    LinearProgram lp;
    lp.maximize = true;
    lp.add_var(0.0, kInf, 1.0);
    lp.add_row({{0, -1.0}}, Sense::LE, 1.0);
    auto s = simplex_solve(lp);
    CHECK(s.status == Status::Unbounded);
}

TEST_CASE("simplex: equality constraint with duals") {
    LinearProgram lp;
    lp.add_var(0.0, 2.0, 1.0);
    lp.add_var(0.0, 2.0, 1.0);
    lp.add_row({{0, 1.0}, {1, 1.0}}, Sense::EQ, 2.0);
    auto s = simplex_solve(lp);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(2.0));
    CHECK(dual_objective(lp, s) == doctest::Approx(2.0));
}

TEST_CASE("simplex: weak duality on random feasible LPs") {
    Rng rng(20240601);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(6));
        const int m = 2 + static_cast<int>(rng.next_below(6));
        LinearProgram lp;
        std::vector<double> x0(n);
        for (int j = 0; j < n; ++j) {
            x0[j] = rng.uniform(0.0, 5.0);
            lp.add_var(0.0, 10.0, rng.uniform(-5.0, 5.0));
        }
        for (int i = 0; i < m; ++i) {
            Row r;
            double ax = 0.0;
            for (int j = 0; j < n; ++j) {
                const double a = rng.uniform(-2.0, 2.0);
                if (std::abs(a) < 0.2) continue;
                r.coeffs.push_back({j, a});
                ax += a * x0[j];
            }
            r.sense = Sense::LE;
            r.rhs = ax + rng.uniform(0.0, 3.0); // feasible by construction at x0
            lp.add_row(std::move(r));
        }
        auto s = simplex_solve(lp);
        REQUIRE(s.status == Status::Optimal);
        CHECK(std::abs(s.objective - dual_objective(lp, s)) <= 1e-6 * (1.0 + std::abs(s.objective)));
        CHECK(s.max_violation <= 1e-7);
    }
}

TEST_CASE("simplex: NaN input rejected") {
    LinearProgram lp;
    lp.add_var(0.0, 1.0, std::nan(""));
    CHECK_THROWS_AS(simplex_solve(lp), ValidationError);
}

TEST_CASE("bnb: integral relaxation equals plain simplex") {
    LinearProgram lp;
    lp.maximize = true;
    lp.add_var(0.0, 3.0, 1.0);
    lp.add_row({{0, 1.0}}, Sense::LE, 2.0);
    MilpProblem milp{lp, {true}, {}};
    auto si = branch_and_bound(milp);
    auto sl = simplex_solve(lp);
    REQUIRE(si.status == Status::Optimal);
    CHECK(si.objective == doctest::Approx(sl.objective));
}

TEST_CASE("bnb: 6-item knapsacks match exhaustive enumeration") {
    Rng rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 6;
        std::vector<double> v(n), w(n);
        for (int j = 0; j < n; ++j) {
            v[j] = rng.uniform(1.0, 10.0);
            w[j] = rng.uniform(1.0, 8.0);
        }
        const double cap = rng.uniform(5.0, 20.0);
        double best = 0.0;
        for (int mask = 0; mask < (1 << n); ++mask) {
            double tv = 0, tw = 0;
            for (int j = 0; j < n; ++j)
                if (mask & (1 << j)) { tv += v[j]; tw += w[j]; }
            if (tw <= cap) best = std::max(best, tv);
        }
        LinearProgram lp;
        lp.maximize = true;
        Row r;
        for (int j = 0; j < n; ++j) {
            lp.add_var(0.0, 1.0, v[j]);
            r.coeffs.push_back({j, w[j]});
        }
        r.sense = Sense::LE;
        r.rhs = cap;
        lp.add_row(std::move(r));
        MilpProblem milp{lp, std::vector<bool>(n, true), {}};
        auto s = branch_and_bound(milp);
        REQUIRE(s.status == Status::Optimal);
        CHECK(s.objective == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("bnb: feasible relaxation, infeasible integers") {
    LinearProgram lp;
    lp.add_var(0.4, 0.6, 1.0);
    MilpProblem milp{lp, {true}, {}};
    auto s = branch_and_bound(milp);
    CHECK(s.status == Status::Infeasible);
}

TEST_CASE("bnb: determinism") {
    LinearProgram lp;
    lp.maximize = true;
    lp.add_var(0.0, 5.0, 3.1);
    lp.add_var(0.0, 5.0, 2.9);
    lp.add_row({{0, 2.0}, {1, 3.0}}, Sense::LE, 11.5);
    MilpProblem milp{lp, {true, true}, {}};
    auto a = branch_and_bound(milp);
    auto b = branch_and_bound(milp);
    CHECK(a.status == b.status);
    CHECK(a.objective == b.objective);
    CHECK(a.values == b.values);
}

TEST_CASE("oa_cut: feasible point is satisfied") {
    QuadBall g(0, 1.0);
    CHECK(!oa_cut(g, {0.5}).has_value());
}

TEST_CASE("oa_cut: tangent at x=2 for x^2<=1 is 4x-5<=0") {
    QuadBall g(0, 1.0);
    auto cut = oa_cut(g, {2.0});
    REQUIRE(cut.has_value());
    REQUIRE(cut->coeffs.size() == 1);
    CHECK(cut->coeffs[0].first == 0);
    CHECK(cut->coeffs[0].second == doctest::Approx(4.0));
    CHECK(cut->rhs == doctest::Approx(5.0));
    // the cut keeps every |x| <= 1 feasible
    for (double x = -1.0; x <= 1.0; x += 0.05) CHECK(4.0 * x <= 5.0 + 1e-12);
}

TEST_CASE("oa_cut: boundary point yields supporting cut") {
    QuadBall g(0, 1.0);
    auto cut = oa_cut(g, {1.0 + 1e-5});
    // just beyond the boundary: cut exists and the boundary point satisfies it (near equality)
    REQUIRE(cut.has_value());
    const double at_boundary = cut->coeffs[0].second * 1.0;
    CHECK(at_boundary <= cut->rhs + 1e-4);
}

TEST_CASE("bnb: cone cuts keep integer optimum inside the ball") {
    // max x s.t. x^2 <= 4, x integer in [-10, 10] -> x = 2
    LinearProgram lp;
    lp.maximize = true;
    lp.add_var(-10.0, 10.0, 1.0);
    MilpProblem milp;
    milp.lp = lp;
    milp.integer = {true};
    milp.cones.push_back(std::make_shared<QuadBall>(0, 4.0));
    auto s = branch_and_bound(milp);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.values[0] == doctest::Approx(2.0));
}

TEST_CASE("dump_lp emits parseable text") {
    LinearProgram lp;
    lp.add_var(0.0, 1.0, 2.5, "alpha");
    lp.add_row({{0, 1.0}}, Sense::LE, 1.0);
    const auto text = dump_lp(lp);
    CHECK(text.find("minimize") != std::string::npos);
    CHECK(text.find("alpha") != std::string::npos);
    CHECK(text.find("end") != std::string::npos);
}
