#include "h2/solver.hpp"
#include "h2/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <queue>
#include <sstream>

namespace h2::solver {

const char* status_name(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::IterationLimit: return "iteration-limit";
    }
    return "?";
}

int LinearProgram::add_var(double lo, double hi, double obj, const std::string& name) {
    objective.push_back(obj);
    lower.push_back(lo);
    upper.push_back(hi);
    if (!name.empty() || !var_names.empty()) {
        var_names.resize(objective.size() - 1, "");
        var_names.push_back(name);
    }
    return num_vars() - 1;
}

void LinearProgram::validate() const {
    const int n = num_vars();
    if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n)
        throw ValidationError("LP: bound arrays do not match variable count");
    for (int j = 0; j < n; ++j) {
        if (std::isnan(objective[j]) || std::isnan(lower[j]) || std::isnan(upper[j]))
            throw ValidationError("LP: NaN in variable data at index " + std::to_string(j));
        if (std::isinf(objective[j]))
            throw ValidationError("LP: infinite objective coefficient at index " + std::to_string(j));
        if (lower[j] > upper[j])
            throw ValidationError("LP: lower bound exceeds upper bound at index " + std::to_string(j));
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (std::isnan(rows[r].rhs) || std::isinf(rows[r].rhs))
            throw ValidationError("LP: bad rhs in row " + std::to_string(r));
        for (auto& [j, a] : rows[r].coeffs) {
            if (j < 0 || j >= n)
                throw ValidationError("LP: row " + std::to_string(r) + " references unknown variable");
            if (std::isnan(a) || std::isinf(a))
                throw ValidationError("LP: bad coefficient in row " + std::to_string(r));
        }
    }
}

// ---------------------------------------------------------------------------
// Bounded-variable revised simplex with explicit basis inverse.
// Variables 0..n-1 are structural, n..n+m-1 are row slacks (A x + s = b).
// ---------------------------------------------------------------------------

namespace {

enum class VStat : std::uint8_t { Basic, AtLower, AtUpper, FreeNB };

struct Basis {
    std::vector<int> basic;       // variable per row
    std::vector<VStat> vstat;     // per variable
    // basis inverse snapshot; still valid after pure bound changes (the basis
    // matrix itself is untouched by branching), saving the O(m^3) reinversion
    std::shared_ptr<std::vector<double>> binv;
};

class Simplex {
public:
    Simplex(const LinearProgram& lp, bool flip_to_min)
        : lp_(lp), m_(static_cast<int>(lp.rows.size())), n_(lp.num_vars()), total_(n_ + m_) {
        obj_.assign(total_, 0.0);
        const double sgn = (lp.maximize && flip_to_min) ? -1.0 : 1.0;
        for (int j = 0; j < n_; ++j) obj_[j] = sgn * lp.objective[j];
        lo_.assign(total_, 0.0);
        hi_.assign(total_, 0.0);
        for (int j = 0; j < n_; ++j) { lo_[j] = lp.lower[j]; hi_[j] = lp.upper[j]; }
        b_.resize(m_);
        cols_.resize(total_);
        for (int i = 0; i < m_; ++i) {
            const Row& r = lp.rows[i];
            b_[i] = r.rhs;
            for (auto& [j, a] : r.coeffs) cols_[j].push_back({i, a});
            const int s = n_ + i;
            cols_[s].push_back({i, 1.0});
            switch (r.sense) {
                case Sense::LE: lo_[s] = 0.0; hi_[s] = kInf; break;
                case Sense::GE: lo_[s] = -kInf; hi_[s] = 0.0; break;
                case Sense::EQ: lo_[s] = 0.0; hi_[s] = 0.0; break;
            }
        }
        x_.assign(total_, 0.0);
    }

    // Cold start: slack basis, structurals at the finite bound nearest zero.
    void start_cold() {
        basis_.resize(m_);
        vstat_.assign(total_, VStat::AtLower);
        for (int j = 0; j < total_; ++j) vstat_[j] = nonbasic_start(j);
        for (int i = 0; i < m_; ++i) {
            basis_[i] = n_ + i;
            vstat_[n_ + i] = VStat::Basic;
        }
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i) binv_[idx(i, i)] = 1.0;
        set_nonbasic_values();
        recompute_basics();
    }

    // Warm start from a previous basis; falls back to cold on mismatch/singularity.
    void start_warm(const Basis& warm) {
        if (static_cast<int>(warm.basic.size()) > m_ ||
            static_cast<int>(warm.vstat.size()) > total_) {
            start_cold();
            return;
        }
        basis_ = warm.basic;
        vstat_.assign(total_, VStat::AtLower);
        for (int j = 0; j < total_; ++j) {
            if (j < static_cast<int>(warm.vstat.size()) && warm.vstat[j] != VStat::Basic)
                vstat_[j] = clamp_nonbasic_state(j, warm.vstat[j]);
            else if (j >= static_cast<int>(warm.vstat.size()))
                vstat_[j] = nonbasic_start(j);
        }
        // rows beyond the warm basis (freshly appended cuts) get their slack
        for (int i = static_cast<int>(warm.basic.size()); i < m_; ++i) basis_.push_back(n_ + i);
        std::vector<bool> seen(total_, false);
        bool ok = true;
        for (int v : basis_) {
            if (v < 0 || v >= total_ || seen[v]) { ok = false; break; }
            seen[v] = true;
        }
        if (!ok) { start_cold(); return; }
        for (int i = 0; i < m_; ++i) vstat_[basis_[i]] = VStat::Basic;
        set_nonbasic_values();
        bool have_inverse = false;
        if (warm.binv && static_cast<int>(warm.basic.size()) == m_ &&
            warm.binv->size() == static_cast<std::size_t>(m_) * m_) {
            // same basis matrix: the parent's inverse carries over, but verify
            // it against the equality system before trusting it
            binv_ = *warm.binv;
            recompute_basics();
            have_inverse = equality_residual() <= 1e-7;
        }
        if (!have_inverse) {
            if (!refactorize()) {
                start_cold();
                return;
            }
            recompute_basics();
        }
    }

    // max |A x + s - b| over rows for the current iterate
    double equality_residual() const {
        double worst = 0.0;
        for (int i = 0; i < m_; ++i) {
            double ax = x_[n_ + i]; // slack
            for (auto& [j, a] : lp_.rows[i].coeffs) ax += a * x_[j];
            worst = std::max(worst, std::abs(ax - b_[i]));
        }
        return worst;
    }

    Status solve(long max_iters = 200000) {
        for (int j = 0; j < total_; ++j)
            if (lo_[j] > hi_[j]) return Status::Infeasible; // crossed bounds (branching)
        if (!phase1(max_iters)) return exhausted_ ? Status::IterationLimit : Status::Infeasible;
        return phase2(max_iters);
    }

    double objective_value() const {
        double v = 0.0;
        for (int j = 0; j < n_; ++j) v += obj_[j] * x_[j];
        return v;
    }

    const std::vector<double>& values() const { return x_; }
    long iterations() const { return iters_; }

    Basis snapshot() const {
        return Basis{basis_, vstat_, std::make_shared<std::vector<double>>(binv_)};
    }

    // duals y = c_B' B^{-1} of the minimisation form
    std::vector<double> duals() const {
        std::vector<double> y(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            const double c = obj_[basis_[i]];
            if (c == 0.0) continue;
            const double* row = &binv_[idx(i, 0)];
            for (int k = 0; k < m_; ++k) y[k] += c * row[k];
        }
        return y;
    }

    double max_primal_violation() const {
        double worst = 0.0;
        for (int i = 0; i < m_; ++i) {
            double ax = 0.0;
            for (auto& [j, a] : lp_.rows[i].coeffs) ax += a * x_[j];
            const double resid = ax + x_[n_ + i] - b_[i];
            worst = std::max(worst, std::abs(resid));
        }
        for (int j = 0; j < total_; ++j) {
            if (lo_[j] > -kInf) worst = std::max(worst, lo_[j] - x_[j]);
            if (hi_[j] < kInf) worst = std::max(worst, x_[j] - hi_[j]);
        }
        return worst;
    }

private:
    std::size_t idx(int r, int c) const { return static_cast<std::size_t>(r) * m_ + c; }

    VStat nonbasic_start(int j) const {
        const bool lf = lo_[j] > -kInf, uf = hi_[j] < kInf;
        if (lf && uf) return (std::abs(lo_[j]) <= std::abs(hi_[j])) ? VStat::AtLower : VStat::AtUpper;
        if (lf) return VStat::AtLower;
        if (uf) return VStat::AtUpper;
        return VStat::FreeNB;
    }

    VStat clamp_nonbasic_state(int j, VStat s) const {
        if (s == VStat::AtLower && lo_[j] <= -kInf) return nonbasic_start(j);
        if (s == VStat::AtUpper && hi_[j] >= kInf) return nonbasic_start(j);
        return s;
    }

    void set_nonbasic_values() {
        for (int j = 0; j < total_; ++j) {
            switch (vstat_[j]) {
                case VStat::AtLower: x_[j] = lo_[j]; break;
                case VStat::AtUpper: x_[j] = hi_[j]; break;
                case VStat::FreeNB: x_[j] = 0.0; break;
                case VStat::Basic: break;
            }
        }
    }

    void recompute_basics() {
        // x_B = B^{-1} (b - N x_N)
        std::vector<double> r = b_;
        for (int j = 0; j < total_; ++j) {
            if (vstat_[j] == VStat::Basic || x_[j] == 0.0) continue;
            for (auto& [i, a] : cols_[j]) r[i] -= a * x_[j];
        }
        for (int i = 0; i < m_; ++i) {
            double v = 0.0;
            const double* row = &binv_[idx(i, 0)];
            for (int k = 0; k < m_; ++k) v += row[k] * r[k];
            x_[basis_[i]] = v;
        }
    }

    // Rebuild binv_ from the basis columns (Gauss-Jordan, partial pivoting).
    bool refactorize() {
        std::vector<double> a(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i)
            for (auto& [r, v] : cols_[basis_[i]]) a[idx(r, i)] = v;
        std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i) inv[idx(i, i)] = 1.0;
        for (int c = 0; c < m_; ++c) {
            int piv = -1;
            double best = 1e-11;
            for (int r = c; r < m_; ++r) {
                const double v = std::abs(a[idx(r, c)]);
                if (v > best) { best = v; piv = r; }
            }
            if (piv < 0) return false;
            if (piv != c) {
                for (int k = 0; k < m_; ++k) {
                    std::swap(a[idx(piv, k)], a[idx(c, k)]);
                    std::swap(inv[idx(piv, k)], inv[idx(c, k)]);
                }
            }
            const double d = 1.0 / a[idx(c, c)];
            for (int k = 0; k < m_; ++k) { a[idx(c, k)] *= d; inv[idx(c, k)] *= d; }
            for (int r = 0; r < m_; ++r) {
                if (r == c) continue;
                const double f = a[idx(r, c)];
                if (f == 0.0) continue;
                for (int k = 0; k < m_; ++k) {
                    a[idx(r, k)] -= f * a[idx(c, k)];
                    inv[idx(r, k)] -= f * inv[idx(c, k)];
                }
            }
        }
        binv_ = std::move(inv);
        return true;
    }

    // w = B^{-1} A_j for a sparse column j
    void ftran(int j, std::vector<double>& w) const {
        std::fill(w.begin(), w.end(), 0.0);
        for (auto& [k, a] : cols_[j]) {
            for (int i = 0; i < m_; ++i) w[i] += a * binv_[idx(i, k)];
        }
    }

    double infeas_of(int var) const {
        const double v = x_[var];
        if (v > hi_[var] + kFeasEps) return v - hi_[var];
        if (v < lo_[var] - kFeasEps) return v - lo_[var]; // negative
        return 0.0;
    }

    double total_infeasibility() const {
        double s = 0.0;
        for (int i = 0; i < m_; ++i) s += std::abs(infeas_of(basis_[i]));
        return s;
    }

    // One simplex pass over the given cost vector. phase1 uses the composite
    // infeasibility gradient and its extended ratio test.
    enum class StepResult { Moved, OptimalStop, UnboundedStop, Stalled };

    StepResult iterate(bool phase1_mode, long max_iters) {
        // composite or real costs of basic variables -> y
        std::vector<double> y(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            double c;
            if (phase1_mode) {
                const double inf = infeas_of(basis_[i]);
                c = (inf > 0.0) ? 1.0 : (inf < 0.0 ? -1.0 : 0.0);
            } else {
                c = obj_[basis_[i]];
            }
            if (c == 0.0) continue;
            const double* row = &binv_[idx(i, 0)];
            for (int k = 0; k < m_; ++k) y[k] += c * row[k];
        }

        // pricing
        int enter = -1, sigma = 0;
        double best_score = 0.0;
        for (int j = 0; j < total_; ++j) {
            if (vstat_[j] == VStat::Basic) continue;
            if (lo_[j] == hi_[j]) continue; // fixed
            double d = phase1_mode ? 0.0 : obj_[j];
            for (auto& [i, a] : cols_[j]) d -= y[i] * a;
            int dir = 0;
            if ((vstat_[j] == VStat::AtLower || vstat_[j] == VStat::FreeNB) && d < -Tol::dj) dir = +1;
            else if ((vstat_[j] == VStat::AtUpper || vstat_[j] == VStat::FreeNB) && d > Tol::dj) dir = -1;
            if (dir == 0) continue;
            if (bland_) { enter = j; sigma = dir; break; } // lowest index
            const double score = std::abs(d);
            if (score > best_score + 1e-15) { best_score = score; enter = j; sigma = dir; }
        }
        if (enter < 0) return StepResult::OptimalStop;

        std::vector<double> w(m_);
        ftran(enter, w);

        // ratio test
        double range = hi_[enter] - lo_[enter]; // may be inf
        double tstar = range;
        int block_row = -1;      // -1 means bound flip
        double block_w = 0.0;
        bool block_at_upper = false;
        for (int i = 0; i < m_; ++i) {
            const double wi = w[i];
            if (std::abs(wi) < 1e-11) continue;
            const int bv = basis_[i];
            const double dxb = -sigma * wi; // change of basic value per unit step
            double ti = -1.0;
            bool at_upper = false;
            if (phase1_mode) {
                const double inf = infeas_of(bv);
                if (inf > 0.0) {          // above upper bound: blocks when dropping to hi
                    if (dxb < 0.0) { ti = (x_[bv] - hi_[bv]) / (-dxb); at_upper = true; }
                    else continue;
                } else if (inf < 0.0) {   // below lower bound: blocks when rising to lo
                    if (dxb > 0.0) { ti = (lo_[bv] - x_[bv]) / dxb; at_upper = false; }
                    else continue;
                } else {
                    if (dxb > 0.0) { if (hi_[bv] >= kInf) continue; ti = (hi_[bv] - x_[bv]) / dxb; at_upper = true; }
                    else { if (lo_[bv] <= -kInf) continue; ti = (x_[bv] - lo_[bv]) / (-dxb); at_upper = false; }
                }
            } else {
                if (dxb > 0.0) { if (hi_[bv] >= kInf) continue; ti = (hi_[bv] - x_[bv]) / dxb; at_upper = true; }
                else { if (lo_[bv] <= -kInf) continue; ti = (x_[bv] - lo_[bv]) / (-dxb); at_upper = false; }
            }
            if (ti < 0.0) ti = 0.0;
            const bool better = ti < tstar - 1e-12;
            const bool tie = !better && ti <= tstar + 1e-12;
            if (better || (tie && block_row >= 0 &&
                           (bland_ ? basis_[i] < basis_[block_row] : std::abs(wi) > std::abs(block_w))) ||
                (tie && block_row < 0 && ti <= tstar)) {
                tstar = std::min(tstar, ti);
                block_row = i;
                block_w = wi;
                block_at_upper = at_upper;
            }
        }

        if (std::isinf(tstar)) {
            if (phase1_mode) return StepResult::Stalled; // cannot happen with consistent data
            return StepResult::UnboundedStop;
        }
#ifdef H2_SIMPLEX_TRACE
        std::fprintf(stderr, "it=%ld ph=%d enter=%d sigma=%d t=%.6g block_row=%d leave=%d infeas=%.6g\n",
                     iters_, phase1_mode ? 1 : 2, enter, sigma, tstar, block_row,
                     block_row >= 0 ? basis_[block_row] : -1, total_infeasibility());
#endif

        // degenerate-step bookkeeping drives Bland's rule
        if (tstar <= 1e-10) {
            if (++degen_streak_ > 60) bland_ = true;
        } else {
            degen_streak_ = 0;
            bland_ = false;
        }

        // apply the step
        x_[enter] += sigma * tstar;
        if (tstar != 0.0) {
            for (int i = 0; i < m_; ++i) x_[basis_[i]] -= sigma * tstar * w[i];
        }

        if (block_row < 0) {
            // bound flip of the entering variable
            vstat_[enter] = (sigma > 0) ? VStat::AtUpper : VStat::AtLower;
            x_[enter] = (sigma > 0) ? hi_[enter] : lo_[enter];
        } else {
            const int leave = basis_[block_row];
            vstat_[leave] = block_at_upper ? VStat::AtUpper : VStat::AtLower;
            x_[leave] = block_at_upper ? hi_[leave] : lo_[leave];
            basis_[block_row] = enter;
            vstat_[enter] = VStat::Basic;
            update_binv(block_row, w);
        }

        if (++iters_ >= max_iters) { exhausted_ = true; return StepResult::Stalled; }
        if (++since_refactor_ >= 400) {
            since_refactor_ = 0;
            if (refactorize()) recompute_basics();
        }
        return StepResult::Moved;
    }

    void update_binv(int r, const std::vector<double>& w) {
        const double piv = w[r];
        double* rowr = &binv_[idx(r, 0)];
        const double inv = 1.0 / piv;
        for (int k = 0; k < m_; ++k) rowr[k] *= inv;
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = w[i];
            if (f == 0.0) continue;
            double* rowi = &binv_[idx(i, 0)];
            for (int k = 0; k < m_; ++k) rowi[k] -= f * rowr[k];
        }
    }

    bool phase1(long max_iters) {
        while (total_infeasibility() > 1e-9) {
            const StepResult r = iterate(true, max_iters);
            if (r == StepResult::Moved) continue;
            if (r == StepResult::OptimalStop) break;
            return false; // stalled / iteration limit
        }
        if (total_infeasibility() > 1e-6) return false;
        bland_ = false;
        degen_streak_ = 0;
        return true;
    }

    Status phase2(long max_iters) {
        for (;;) {
            const StepResult r = iterate(false, max_iters);
            if (r == StepResult::Moved) continue;
            if (r == StepResult::UnboundedStop) return Status::Unbounded;
            if (r == StepResult::Stalled) return Status::IterationLimit;
            break;
        }
        // final cleanup for numerical residue
        if (refactorize()) recompute_basics();
        return Status::Optimal;
    }

    static constexpr double kFeasEps = 1e-9;

    const LinearProgram& lp_;
    int m_, n_, total_;
    std::vector<double> obj_, lo_, hi_, b_, x_;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<int> basis_;
    std::vector<VStat> vstat_;
    std::vector<double> binv_;
    long iters_ = 0;
    int since_refactor_ = 0;
    int degen_streak_ = 0;
    bool bland_ = false;
    bool exhausted_ = false;
};

} // namespace

Solution simplex_solve(const LinearProgram& lp) {
    lp.validate();
    Solution sol;
    const int n = lp.num_vars();
    const int m = static_cast<int>(lp.rows.size());
    Simplex sx(lp, true);
    sx.start_cold();
    const Status st = sx.solve();
    sol.status = st;
    sol.iterations = sx.iterations();
    if (st != Status::Optimal) return sol;
    sol.values.assign(sx.values().begin(), sx.values().begin() + n);
    sol.objective = 0.0;
    for (int j = 0; j < n; ++j) sol.objective += lp.objective[j] * sol.values[j];
    // duals and reduced costs in the original (min or max) sense
    const double sgn = lp.maximize ? -1.0 : 1.0;
    std::vector<double> y = sx.duals();
    sol.duals.resize(m);
    for (int i = 0; i < m; ++i) sol.duals[i] = sgn * y[i];
    sol.reduced_costs.assign(n, 0.0);
    for (int j = 0; j < n; ++j) sol.reduced_costs[j] = lp.objective[j];
    // subtract y'A per row (row-wise sweep is cheaper than column lookups here)
    for (int i = 0; i < m; ++i) {
        const double yi = sol.duals[i];
        if (yi == 0.0) continue;
        for (auto& [j, a] : lp.rows[i].coeffs) sol.reduced_costs[j] -= yi * a;
    }
    sol.max_violation = sx.max_primal_violation();
    return sol;
}

std::optional<Row> oa_cut(const ConvexConstraint& g, const std::vector<double>& point) {
    double gval = g.eval(point);
    std::vector<double> x = point;
    if (!std::isfinite(gval)) {
        // perturb non-differentiable / undefined evaluation points
        for (auto& v : x) v += 1e-7;
        gval = g.eval(x);
    }
    if (gval <= Tol::cut) return std::nullopt;
    auto grad = g.grad(x);
    bool bad = false;
    for (auto& [j, gj] : grad)
        if (!std::isfinite(gj)) bad = true;
    if (bad) {
        for (auto& v : x) v += 1e-7;
        gval = g.eval(x);
        grad = g.grad(x);
    }
    // g(x̂) + ∇g·(x - x̂) <= 0  ->  ∇g·x <= ∇g·x̂ - g(x̂)
    Row cut;
    cut.sense = Sense::LE;
    double rhs = -gval;
    for (auto& [j, gj] : grad) {
        rhs += gj * x[j];
        cut.coeffs.push_back({j, gj});
    }
    cut.rhs = rhs;
    return cut;
}

// ---------------------------------------------------------------------------
// Branch and bound: best-bound search, most-fractional branching (lowest
// index on ties), global pool of outer-approximation cuts, warm-started
// node LPs.
// ---------------------------------------------------------------------------

namespace {

struct BnbNode {
    long id = 0;
    double bound = 0.0; // minimisation bound
    std::vector<std::array<double, 2>> var_bounds; // full copy (desk scale)
    std::shared_ptr<Basis> warm;
};

struct NodeOrder {
    bool operator()(const BnbNode& a, const BnbNode& b) const {
        if (a.bound != b.bound) return a.bound > b.bound; // min-heap on bound
        return a.id > b.id;
    }
};

} // namespace

Solution branch_and_bound(const MilpProblem& milp, const BnbOptions& opts) {
    milp.lp.validate();
    const int n = milp.lp.num_vars();
    if (static_cast<int>(milp.integer.size()) != n)
        throw ValidationError("MILP: integrality mask length does not match variable count");

    const bool maximize = milp.lp.maximize;
    LinearProgram base = milp.lp; // cuts are appended to base.rows
    if (maximize) {
        base.maximize = false;
        for (auto& c : base.objective) c = -c;
    }

    Solution best;
    best.status = Status::Infeasible;
    bool have_incumbent = false;
    double incumbent = kInf;
    std::vector<double> incumbent_x;

    std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> open;
    long next_id = 0;
    long explored = 0;
    bool hit_limit = false;

    BnbNode root;
    root.id = next_id++;
    root.bound = -kInf;
    root.var_bounds.resize(n);
    for (int j = 0; j < n; ++j) root.var_bounds[j] = {base.lower[j], base.upper[j]};
    open.push(std::move(root));

    Solution out;
    long total_iters = 0;

    while (!open.empty()) {
        if (explored >= opts.node_limit) { hit_limit = true; break; }
        BnbNode node = open.top();
        open.pop();
        if (have_incumbent && node.bound >= incumbent - 1e-9) continue; // bounded away
        ++explored;

        for (int j = 0; j < n; ++j) {
            base.lower[j] = node.var_bounds[j][0];
            base.upper[j] = node.var_bounds[j][1];
        }

        auto sx = std::make_unique<Simplex>(base, false);
        if (node.warm) {
            sx->start_warm(*node.warm);
        } else if (opts.root_warm.handle) {
            // basis carried over from a previous structurally-similar solve;
            // coefficients changed, so the inverse is rebuilt from scratch
            Basis root = *std::static_pointer_cast<Basis>(opts.root_warm.handle);
            root.binv.reset();
            sx->start_warm(root);
        } else {
            sx->start_cold();
        }
        Status st = sx->solve();
        total_iters += sx->iterations();
        if (st == Status::Unbounded) {
            out.status = Status::Unbounded;
            out.nodes = explored;
            out.iterations = total_iters;
            return out;
        }
        if (st != Status::Optimal) continue; // infeasible node (or stalled)

        // outer-approximation rounds at this node's LP optimum
        bool node_ok = true;
        for (int round = 0; round < opts.max_cut_rounds_per_node; ++round) {
            bool added = false;
            const std::vector<double>& xall = sx->values();
            std::vector<double> xs(xall.begin(), xall.begin() + n);
            for (auto& cone : milp.cones) {
                auto cut = oa_cut(*cone, xs);
                if (!cut) continue;
                base.add_row(*cut);
                added = true;
            }
            if (!added) break;
            Basis warm = sx->snapshot();
            auto sx2 = std::make_unique<Simplex>(base, false);
            sx2->start_warm(warm);
            st = sx2->solve();
            total_iters += sx2->iterations();
            if (st != Status::Optimal) { node_ok = false; break; }
            sx = std::move(sx2);
        }
        if (!node_ok) continue;

        if (node.id == 0)
            out.root_basis.handle = std::make_shared<Basis>(sx->snapshot());

        const double obj = sx->objective_value();
        if (have_incumbent && obj >= incumbent - 1e-9) continue;

        // pick the most fractional integer variable
        const std::vector<double>& x = sx->values();
        int branch_var = -1;
        double best_frac_dist = 1.0;
        for (int j = 0; j < n; ++j) {
            if (!milp.integer[j]) continue;
            const double f = x[j] - std::floor(x[j]);
            const double dist = std::abs(f - 0.5);
            if (f > Tol::integrality && f < 1.0 - Tol::integrality && dist < best_frac_dist - 1e-12) {
                best_frac_dist = dist;
                branch_var = j;
            }
        }

        if (branch_var < 0) {
            // integral: new incumbent
            incumbent = obj;
            have_incumbent = true;
            incumbent_x.assign(x.begin(), x.begin() + n);
            for (int j = 0; j < n; ++j)
                if (milp.integer[j]) incumbent_x[j] = std::round(incumbent_x[j]);
            continue;
        }

        auto warm = std::make_shared<Basis>(sx->snapshot());
        if (open.size() > 64) warm->binv.reset(); // cap inverse-snapshot memory
        const double xv = x[branch_var];
        BnbNode down;
        down.id = next_id++;
        down.bound = obj;
        down.var_bounds = node.var_bounds;
        down.var_bounds[branch_var][1] = std::floor(xv);
        down.warm = warm;
        BnbNode up;
        up.id = next_id++;
        up.bound = obj;
        up.var_bounds = node.var_bounds;
        up.var_bounds[branch_var][0] = std::ceil(xv);
        up.warm = warm;
        open.push(std::move(down));
        open.push(std::move(up));
    }

    out.nodes = explored;
    out.iterations = total_iters;
    if (!have_incumbent) {
        out.status = hit_limit ? Status::IterationLimit : Status::Infeasible;
        return out;
    }
    out.status = hit_limit ? Status::IterationLimit : Status::Optimal;
    out.values = incumbent_x;
    out.objective = maximize ? -incumbent : incumbent;
    // residual check against the original constraints
    double worst = 0.0;
    for (auto& r : milp.lp.rows) {
        double ax = 0.0;
        for (auto& [j, a] : r.coeffs) ax += a * out.values[j];
        if (r.sense == Sense::LE) worst = std::max(worst, ax - r.rhs);
        else if (r.sense == Sense::GE) worst = std::max(worst, r.rhs - ax);
        else worst = std::max(worst, std::abs(ax - r.rhs));
    }
    out.max_violation = worst;
    return out;
}

std::string dump_lp(const LinearProgram& lp, const std::vector<bool>* integer_mask) {
    std::ostringstream os;
    auto vname = [&](int j) {
        if (j < static_cast<int>(lp.var_names.size()) && !lp.var_names[j].empty())
            return lp.var_names[j];
        return "x" + std::to_string(j);
    };
    os << (lp.maximize ? "maximize" : "minimize") << "\n obj:";
    for (int j = 0; j < lp.num_vars(); ++j) {
        if (lp.objective[j] == 0.0) continue;
        os << " " << (lp.objective[j] >= 0 ? "+" : "-") << " " << std::abs(lp.objective[j]) << " " << vname(j);
    }
    os << "\nsubject to\n";
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
        os << " r" << i << ":";
        for (auto& [j, a] : lp.rows[i].coeffs)
            os << " " << (a >= 0 ? "+" : "-") << " " << std::abs(a) << " " << vname(j);
        switch (lp.rows[i].sense) {
            case Sense::LE: os << " <= "; break;
            case Sense::EQ: os << " = "; break;
            case Sense::GE: os << " >= "; break;
        }
        os << lp.rows[i].rhs << "\n";
    }
    os << "bounds\n";
    for (int j = 0; j < lp.num_vars(); ++j) {
        os << " ";
        if (lp.lower[j] <= -kInf) os << "-inf";
        else os << lp.lower[j];
        os << " <= " << vname(j) << " <= ";
        if (lp.upper[j] >= kInf) os << "+inf";
        else os << lp.upper[j];
        os << "\n";
    }
    if (integer_mask) {
        os << "integers\n";
        for (int j = 0; j < lp.num_vars(); ++j)
            if ((*integer_mask)[j]) os << " " << vname(j);
        os << "\n";
    }
    os << "end\n";
    return os.str();
}

} // namespace h2::solver
