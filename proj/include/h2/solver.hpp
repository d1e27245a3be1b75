#pragma once
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

// Self-contained dense LP/MILP engine: bounded-variable revised simplex with
// an explicit basis inverse, best-bound branch and bound over the integer
// mask, and outer-approximation cuts for registered convex constraints.
// Desk-scale problems only (a few thousand variables); no factorisation
// updates, no presolve.

namespace h2::solver {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shared numeric tolerances.
struct Tol {
    static constexpr double feas = 1e-7;        // absolute constraint feasibility
    static constexpr double integrality = 1e-6; // |x - round(x)|
    static constexpr double cut = 1e-6;         // convex-cut violation
    static constexpr double pivot = 1e-9;       // smallest acceptable pivot
    static constexpr double dj = 1e-9;          // reduced-cost optimality
};

enum class Sense { LE, EQ, GE };

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

const char* status_name(Status s);

struct Row {
    std::vector<std::pair<int, double>> coeffs; // (variable, coefficient)
    Sense sense = Sense::LE;
    double rhs = 0.0;
};

struct LinearProgram {
    bool maximize = false;
    std::vector<double> objective;
    std::vector<double> lower, upper;
    std::vector<Row> rows;
    std::vector<std::string> var_names; // optional, for dumps

    int num_vars() const { return static_cast<int>(objective.size()); }

    int add_var(double lo, double hi, double obj, const std::string& name = "");
    void add_row(Row r) { rows.push_back(std::move(r)); }
    void add_row(std::vector<std::pair<int, double>> coeffs, Sense sense, double rhs) {
        rows.push_back(Row{std::move(coeffs), sense, rhs});
    }
    void validate() const; // dimension/bound/NaN checks -> ValidationError
};

// Opaque basis snapshot for warm-starting a structurally similar solve.
struct WarmStart {
    std::shared_ptr<void> handle;
};

struct Solution {
    Status status = Status::Infeasible;
    std::vector<double> values;
    double objective = 0.0;
    std::vector<double> duals;         // one per row (LP solves only)
    std::vector<double> reduced_costs; // one per variable (LP solves only)
    double max_violation = 0.0;        // post-solve constraint residual
    long iterations = 0;
    long nodes = 0;     // branch-and-bound only
    WarmStart root_basis; // reusable for the next solve of a similar model
};

// Convex constraint g(x) <= 0 used as a cut oracle. `grad` returns the sparse
// gradient at x; both are only queried at candidate LP optima.
class ConvexConstraint {
public:
    virtual ~ConvexConstraint() = default;
    virtual double eval(const std::vector<double>& x) const = 0;
    virtual std::vector<std::pair<int, double>> grad(const std::vector<double>& x) const = 0;
    virtual std::string name() const { return "cone"; }
};

struct MilpProblem {
    LinearProgram lp;
    std::vector<bool> integer; // mask, one per variable
    std::vector<std::shared_ptr<ConvexConstraint>> cones;
};

// Tangent cut of g at point, or nullopt when g(point) <= tol (satisfied).
// The cut g(x̂) + ∇g(x̂)·(x − x̂) <= 0 never excludes a g-feasible point.
std::optional<Row> oa_cut(const ConvexConstraint& g, const std::vector<double>& point);

Solution simplex_solve(const LinearProgram& lp);

struct BnbOptions {
    long node_limit = 200000;
    int max_cut_rounds_per_node = 30;
    WarmStart root_warm; // optional basis from a previous similar solve
};

Solution branch_and_bound(const MilpProblem& milp, const BnbOptions& opts = {});

// Plain-text dump of the problem (LP-style grammar, see README).
std::string dump_lp(const LinearProgram& lp, const std::vector<bool>* integer_mask = nullptr);

} // namespace h2::solver
