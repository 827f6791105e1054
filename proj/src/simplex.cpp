#include "hfair/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hfair/error.hpp"

namespace hfair {

const char* to_string(LpStatus s) {
    switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
    }
    return "unknown";
}

void LinearProgram::check_shape() const {
    const std::size_t n = c.size();
    if (a_ub.size() != b_ub.size()) throw ArgumentError("a_ub and b_ub row counts differ");
    if (a_eq.size() != b_eq.size()) throw ArgumentError("a_eq and b_eq row counts differ");
    for (const auto& row : a_ub) {
        if (row.size() != n) throw ArgumentError("a_ub row has wrong width");
    }
    for (const auto& row : a_eq) {
        if (row.size() != n) throw ArgumentError("a_eq row has wrong width");
    }
    if (!var_names.empty() && var_names.size() != n) throw ArgumentError("var_names has wrong length");
}

namespace {

double row_scale(const std::vector<double>& row) {
    double s = 0.0;
    for (double v : row) s = std::max(s, std::abs(v));
    return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0), cost_(cols + 1, 0.0), basis_(rows, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    std::vector<std::size_t>& basis() { return basis_; }
    // -(current objective value)
    double objective() const { return -cost_[cols_]; }

    void set_costs(const std::vector<double>& costs) {
        std::fill(cost_.begin(), cost_.end(), 0.0);
        std::copy(costs.begin(), costs.end(), cost_.begin());
        for (std::size_t r = 0; r < rows_; ++r) {
            const double cb = cost_[basis_[r]];
            if (cb == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) cost_[c] -= cb * at(r, c);
        }
    }

    void pivot(std::size_t pr, std::size_t pc) {
        const double p = at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) /= p;
        at(pr, pc) = 1.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
        const double f = cost_[pc];
        if (f != 0.0) {
            for (std::size_t c = 0; c <= cols_; ++c) cost_[c] -= f * at(pr, c);
            cost_[pc] = 0.0;
        }
        basis_[pr] = pc;
    }

    void erase_row(std::size_t r) {
        data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * (cols_ + 1)),
                    data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * (cols_ + 1)));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --rows_;
    }

    enum class Outcome { Optimal, Unbounded, IterationLimit };

    // Bland's rule: lowest-index improving column enters; among tied ratios
    // the row whose basic variable has the lowest index leaves.
    Outcome run(const std::vector<bool>& allowed, const SimplexOptions& opt, std::size_t& iterations,
                std::size_t cap) {
        while (true) {
            std::size_t enter = cols_;
            for (std::size_t c = 0; c < cols_; ++c) {
                if (allowed[c] && cost_[c] < -opt.optimality_tol) {
                    enter = c;
                    break;
                }
            }
            if (enter == cols_) return Outcome::Optimal;
            if (iterations >= cap) return Outcome::IterationLimit;

            std::size_t leave = rows_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < rows_; ++r) {
                const double a = at(r, enter);
                if (a <= opt.pivot_tol) continue;
                const double ratio = std::max(rhs(r), 0.0) / a;
                const double tie = 1e-12 * std::max(1.0, std::abs(best));
                if (leave == rows_ || ratio < best - tie) {
                    best = ratio;
                    leave = r;
                } else if (ratio <= best + tie && basis_[r] < basis_[leave]) {
                    leave = r;
                }
            }
            if (leave == rows_) return Outcome::Unbounded;
            pivot(leave, enter);
            ++iterations;
            for (std::size_t r = 0; r < rows_; ++r) {
                if (rhs(r) < 0.0 && rhs(r) > -opt.feasibility_tol) rhs(r) = 0.0;
            }
        }
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
    std::vector<double> cost_;
    std::vector<std::size_t> basis_;
};

struct ScaledRow {
    std::vector<double> a;
    double b;
    bool equality;
};

} // namespace

double max_residual(const LinearProgram& lp, const std::vector<double>& v) {
    double worst = 0.0;
    for (double x : v) worst = std::max(worst, -x);
    for (std::size_t i = 0; i < lp.a_ub.size(); ++i) {
        if (std::isinf(lp.b_ub[i]) && lp.b_ub[i] > 0) continue;
        const double s = std::max(1.0, row_scale(lp.a_ub[i]));
        worst = std::max(worst, (dot(lp.a_ub[i], v) - lp.b_ub[i]) / s);
    }
    for (std::size_t i = 0; i < lp.a_eq.size(); ++i) {
        const double s = std::max(1.0, row_scale(lp.a_eq[i]));
        worst = std::max(worst, std::abs(dot(lp.a_eq[i], v) - lp.b_eq[i]) / s);
    }
    return worst;
}

LPSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opt) {
    lp.check_shape();
    const std::size_t n = lp.var_count();
    LPSolution sol;

    std::vector<ScaledRow> rows;
    bool trivially_infeasible = false;
    auto add_row = [&](const std::vector<double>& a, double b, bool equality) {
        if (std::isnan(b)) throw ArgumentError("NaN right-hand side");
        if (!equality && std::isinf(b) && b > 0) return;
        const double s = row_scale(a);
        if (s == 0.0 || std::isinf(b)) {
            const bool ok = equality ? std::abs(b) <= opt.feasibility_tol : b >= -opt.feasibility_tol;
            if (!ok || std::isinf(b)) trivially_infeasible = true;
            return;
        }
        ScaledRow r{a, b / s, equality};
        for (double& x : r.a) x /= s;
        rows.push_back(std::move(r));
    };
    for (std::size_t i = 0; i < lp.a_ub.size(); ++i) add_row(lp.a_ub[i], lp.b_ub[i], false);
    for (std::size_t i = 0; i < lp.a_eq.size(); ++i) add_row(lp.a_eq[i], lp.b_eq[i], true);
    if (trivially_infeasible) {
        sol.status = LpStatus::Infeasible;
        return sol;
    }

    std::size_t slack_count = 0;
    std::size_t art_count = 0;
    for (const auto& r : rows) {
        if (!r.equality) ++slack_count;
        if (r.equality || r.b < 0.0) ++art_count;
    }
    const std::size_t m = rows.size();
    const std::size_t cols = n + slack_count + art_count;
    Tableau t(m, cols);
    std::size_t next_slack = n;
    std::size_t next_art = n + slack_count;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& r = rows[i];
        const double sign = r.b < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) t.at(i, j) = sign * r.a[j];
        t.rhs(i) = sign * r.b;
        if (!r.equality) t.at(i, next_slack) = sign;
        if (r.equality || r.b < 0.0) {
            t.at(i, next_art) = 1.0;
            t.basis()[i] = next_art++;
        } else {
            t.basis()[i] = next_slack;
        }
        if (!r.equality) ++next_slack;
    }

    const std::size_t first_art = n + slack_count;
    const std::size_t cap = opt.max_iterations ? opt.max_iterations : 10 * (m + cols) * (m + cols);
    std::vector<bool> allowed(cols, true);

    if (art_count > 0) {
        std::vector<double> phase1(cols, 0.0);
        for (std::size_t j = first_art; j < cols; ++j) phase1[j] = 1.0;
        t.set_costs(phase1);
        const auto outcome = t.run(allowed, opt, sol.iterations, cap);
        if (outcome == Tableau::Outcome::IterationLimit) {
            sol.status = LpStatus::IterationLimit;
            return sol;
        }
        if (t.objective() > opt.feasibility_tol * std::max<std::size_t>(1, m)) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        // Drive zero-valued artificials out of the basis; rows where that is
        // impossible are linearly dependent and dropped.
        for (std::size_t r = t.rows(); r-- > 0;) {
            if (t.basis()[r] < first_art) continue;
            std::size_t best = cols;
            double best_abs = opt.pivot_tol;
            for (std::size_t j = 0; j < first_art; ++j) {
                if (std::abs(t.at(r, j)) > best_abs) {
                    best_abs = std::abs(t.at(r, j));
                    best = j;
                }
            }
            if (best == cols) {
                t.erase_row(r);
            } else {
                t.pivot(r, best);
            }
        }
        for (std::size_t j = first_art; j < cols; ++j) allowed[j] = false;
    }

    std::vector<double> phase2(cols, 0.0);
    std::copy(lp.c.begin(), lp.c.end(), phase2.begin());
    t.set_costs(phase2);
    const auto outcome = t.run(allowed, opt, sol.iterations, cap);
    if (outcome == Tableau::Outcome::IterationLimit) {
        sol.status = LpStatus::IterationLimit;
        return sol;
    }
    if (outcome == Tableau::Outcome::Unbounded) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    sol.status = LpStatus::Optimal;
    sol.values.assign(n, 0.0);
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const std::size_t b = t.basis()[r];
        if (b < n) sol.values[b] = t.rhs(r);
    }
    sol.basis = t.basis();
    std::sort(sol.basis.begin(), sol.basis.end());
    sol.objective = lp.objective_offset + dot(lp.c, sol.values);
    sol.max_residual = max_residual(lp, sol.values);
    return sol;
}

std::string to_lp_format(const LinearProgram& lp) {
    lp.check_shape();
    auto name = [&](std::size_t j) {
        return lp.var_names.empty() ? "x" + std::to_string(j) : lp.var_names[j];
    };
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    auto expr = [&](const std::vector<double>& row) {
        std::string s;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (row[j] == 0.0) continue;
            s += row[j] < 0 ? " - " : " + ";
            s += num(std::abs(row[j])) + " " + name(j);
        }
        return s.empty() ? std::string(" 0 ") + name(0) : s;
    };
    std::string out = "\\ objective offset " + num(lp.objective_offset) + "\nMinimize\n obj:" + expr(lp.c) + "\nSubject To\n";
    for (std::size_t i = 0; i < lp.a_ub.size(); ++i) {
        if (std::isinf(lp.b_ub[i]) && lp.b_ub[i] > 0) {
            out += "\\ ub" + std::to_string(i) + " vacuous (+inf)\n";
            continue;
        }
        out += " ub" + std::to_string(i) + ":" + expr(lp.a_ub[i]) + " <= " + num(lp.b_ub[i]) + "\n";
    }
    for (std::size_t i = 0; i < lp.a_eq.size(); ++i) {
        out += " eq" + std::to_string(i) + ":" + expr(lp.a_eq[i]) + " = " + num(lp.b_eq[i]) + "\n";
    }
    out += "End\n";
    return out;
}

} // namespace hfair
