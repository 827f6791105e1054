#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hfair {

using DenseMatrix = std::vector<std::vector<double>>;

// minimize  objective_offset + c . v
// s.t.      a_ub v <= b_ub,  a_eq v = b_eq,  v >= 0
//
// Rows of a_ub whose bound is +infinity are vacuous and ignored by the solver.
struct LinearProgram {
    std::vector<double> c;
    double objective_offset = 0.0;
    DenseMatrix a_ub;
    std::vector<double> b_ub;
    DenseMatrix a_eq;
    std::vector<double> b_eq;
    std::vector<std::string> var_names; // optional, used by to_lp_format

    std::size_t var_count() const { return c.size(); }
    // Throws ArgumentError if any dimension is inconsistent.
    void check_shape() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus s);

struct LPSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> values;
    double objective = 0.0;
    std::vector<std::size_t> basis; // tableau column indices, structural columns first
    std::size_t iterations = 0;
    // Worst violation over all constraints and bounds, with each row scaled by
    // max(1, its largest coefficient magnitude).
    double max_residual = 0.0;
};

struct SimplexOptions {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-11;
    std::size_t max_iterations = 0; // 0: 10 * (rows + cols)^2
};

// Dense two-phase primal simplex with Bland's rule. Never throws for
// infeasible/unbounded problems; those are reported through the status.
LPSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

// Scaled residual of an arbitrary point, see LPSolution::max_residual.
double max_residual(const LinearProgram& lp, const std::vector<double>& v);

// CPLEX LP text format, for cross-checking with external solvers.
std::string to_lp_format(const LinearProgram& lp);

} // namespace hfair
