#include "hfair/fair_lp.hpp"

#include <cmath>
#include <string>

#include "hfair/error.hpp"

namespace hfair {

PostProcessor::PostProcessor(std::size_t label_count, std::vector<double> table)
    : labels_(label_count), table_(std::move(table)) {
    if (labels_ < 2) throw ArgumentError("post-processor needs at least two labels");
    if (table_.size() != labels_ * labels_ * kGroupCount) throw ArgumentError("post-processor table has wrong size");
    for (Label yhat = 0; yhat < labels_; ++yhat) {
        for (int z = 0; z < 2; ++z) {
            if (!is_distribution(row(yhat, z), 1e-8)) {
                throw ArgumentError("post-processor row (" + std::to_string(yhat) + ", " + std::to_string(z) +
                                    ") is not a distribution");
            }
        }
    }
}

PostProcessor PostProcessor::identity(std::size_t label_count) {
    std::vector<Label> target;
    for (Label yhat = 0; yhat < label_count; ++yhat) {
        target.push_back(yhat);
        target.push_back(yhat);
    }
    return deterministic(label_count, target);
}

PostProcessor PostProcessor::uniform(std::size_t label_count) {
    return PostProcessor(label_count, std::vector<double>(label_count * label_count * kGroupCount,
                                                          1.0 / static_cast<double>(label_count)));
}

PostProcessor PostProcessor::deterministic(std::size_t label_count, std::span<const Label> target) {
    if (target.size() != label_count * kGroupCount) throw ArgumentError("target map has wrong size");
    std::vector<double> table(label_count * label_count * kGroupCount, 0.0);
    for (std::size_t cell = 0; cell < target.size(); ++cell) {
        if (target[cell] >= label_count) throw ArgumentError("target label out of range");
        table[cell * label_count + target[cell]] = 1.0;
    }
    return PostProcessor(label_count, std::move(table));
}

namespace {

LinearProgram base_program(const VariableIndex& idx) {
    const std::size_t k = idx.label_count;
    LinearProgram lp;
    lp.c.assign(idx.var_count(), 0.0);
    lp.var_names.resize(idx.var_count());
    for (Label yt = 0; yt < k; ++yt) {
        for (Label yh = 0; yh < k; ++yh) {
            for (int z = 0; z < 2; ++z) {
                lp.var_names[idx.column(yt, yh, z)] =
                    "v_" + std::to_string(yt) + "_" + std::to_string(yh) + "_" + std::to_string(z);
            }
        }
    }
    if (idx.has_gap_var) lp.var_names[idx.gap_column()] = "t";
    // sum_ytilde v(ytilde | yhat, z) = 1, rows ordered by (yhat, z)
    for (Label yh = 0; yh < k; ++yh) {
        for (int z = 0; z < 2; ++z) {
            std::vector<double> row(idx.var_count(), 0.0);
            for (Label yt = 0; yt < k; ++yt) row[idx.column(yt, yh, z)] = 1.0;
            lp.a_eq.push_back(std::move(row));
            lp.b_eq.push_back(1.0);
        }
    }
    return lp;
}

// Row of component i of E[eta | Z=0] - E[eta | Z=1] as a function of v.
std::vector<double> gap_row(const EmpiricalMoments& m, const VariableIndex& idx, std::size_t i) {
    const std::size_t k = idx.label_count;
    std::vector<double> row(idx.var_count(), 0.0);
    for (Label yt = 0; yt < k; ++yt) {
        for (Label yh = 0; yh < k; ++yh) {
            row[idx.column(yt, yh, 0)] = m.xi(yt, yh, 0)[i];
            row[idx.column(yt, yh, 1)] = -m.xi(yt, yh, 1)[i];
        }
    }
    return row;
}

// Coefficients of expected accuracy: sum p(yhat, y, z) v(y | yhat, z).
std::vector<double> accuracy_row(const EmpiricalMoments& m, const VariableIndex& idx) {
    const std::size_t k = idx.label_count;
    std::vector<double> row(idx.var_count(), 0.0);
    for (Label y = 0; y < k; ++y) {
        for (Label yh = 0; yh < k; ++yh) {
            for (int z = 0; z < 2; ++z) row[idx.column(y, yh, z)] = m.joint(yh, y, z);
        }
    }
    return row;
}

std::vector<double> negated(std::vector<double> row) {
    for (double& v : row) v = -v;
    return row;
}

} // namespace

FairnessProgram build_fair_lp(const EmpiricalMoments& m, double epsilon) {
    if (!(epsilon >= 0.0)) throw ArgumentError("epsilon must be >= 0");
    VariableIndex idx{m.label_count(), false};
    LinearProgram lp = base_program(idx);
    lp.objective_offset = 1.0;
    lp.c = negated(accuracy_row(m, idx));
    for (std::size_t i = 0; i < m.dim(); ++i) {
        auto row = gap_row(m, idx, i);
        lp.a_ub.push_back(row);
        lp.b_ub.push_back(epsilon);
        lp.a_ub.push_back(negated(std::move(row)));
        lp.b_ub.push_back(epsilon);
    }
    return {std::move(lp), idx};
}

FairnessProgram build_gap_lp(const EmpiricalMoments& m, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
    VariableIndex idx{m.label_count(), true};
    LinearProgram lp = base_program(idx);
    lp.c[idx.gap_column()] = 1.0;
    for (std::size_t i = 0; i < m.dim(); ++i) {
        auto row = gap_row(m, idx, i);
        auto neg = negated(row);
        row[idx.gap_column()] = -1.0;
        neg[idx.gap_column()] = -1.0;
        lp.a_ub.push_back(std::move(row));
        lp.b_ub.push_back(0.0);
        lp.a_ub.push_back(std::move(neg));
        lp.b_ub.push_back(0.0);
    }
    lp.a_ub.push_back(negated(accuracy_row(m, idx)));
    lp.b_ub.push_back(-alpha);
    return {std::move(lp), idx};
}

PostProcessor extract_postprocessor(const FairnessProgram& fp, const LPSolution& sol) {
    if (sol.status != LpStatus::Optimal) {
        throw SolverError(std::string("cannot extract a post-processor from a ") + to_string(sol.status) +
                          " solution");
    }
    const auto& idx = fp.index;
    const std::size_t k = idx.label_count;
    if (sol.values.size() != idx.var_count()) throw SolverError("solution has wrong length");
    std::vector<double> table(k * k * kGroupCount, 0.0);
    for (Label yh = 0; yh < k; ++yh) {
        for (int z = 0; z < 2; ++z) {
            double sum = 0.0;
            const std::size_t base = (yh * kGroupCount + static_cast<std::size_t>(z)) * k;
            for (Label yt = 0; yt < k; ++yt) {
                double v = sol.values[idx.column(yt, yh, z)];
                if (v < -1e-9) throw SolverError("negative probability in LP solution");
                if (v < 0.0) v = 0.0;
                table[base + yt] = v;
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-6) throw SolverError("LP solution row does not sum to 1");
            for (Label yt = 0; yt < k; ++yt) table[base + yt] /= sum;
        }
    }
    return PostProcessor(k, std::move(table));
}

} // namespace hfair
