#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hfair/core.hpp"
#include "hfair/estimators.hpp"
#include "hfair/simplex.hpp"

namespace hfair {

// Group-dependent stochastic relabeling p(ytilde | yhat, z): one probability
// row per (yhat, z).
class PostProcessor {
public:
    PostProcessor() = default;
    // table is indexed [(yhat * 2 + z) * label_count + ytilde]; every row must be a distribution.
    PostProcessor(std::size_t label_count, std::vector<double> table);

    static PostProcessor identity(std::size_t label_count);
    static PostProcessor uniform(std::size_t label_count);
    // Deterministic map: target[yhat * 2 + z] is the output label.
    static PostProcessor deterministic(std::size_t label_count, std::span<const Label> target);

    std::size_t label_count() const { return labels_; }
    double prob(Label ytilde, Label yhat, int z) const {
        return table_[(yhat * kGroupCount + static_cast<std::size_t>(z)) * labels_ + ytilde];
    }
    std::span<const double> row(Label yhat, int z) const {
        return {table_.data() + (yhat * kGroupCount + static_cast<std::size_t>(z)) * labels_, labels_};
    }
    const std::vector<double>& table() const { return table_; }

private:
    std::size_t labels_ = 0;
    std::vector<double> table_;
};

// Column layout of the post-processing LP: v(ytilde | yhat, z) sits at
// column (ytilde * K + yhat) * 2 + z, followed by the gap variable t when present.
struct VariableIndex {
    std::size_t label_count = 0;
    bool has_gap_var = false;

    std::size_t column(Label ytilde, Label yhat, int z) const {
        return (ytilde * label_count + yhat) * kGroupCount + static_cast<std::size_t>(z);
    }
    std::size_t probability_vars() const { return kGroupCount * label_count * label_count; }
    std::size_t gap_column() const { return probability_vars(); }
    std::size_t var_count() const { return probability_vars() + (has_gap_var ? 1 : 0); }
};

struct FairnessProgram {
    LinearProgram program;
    VariableIndex index;
};

// minimize expected 0-1 loss subject to |happiness gap_i| <= epsilon for every
// component i. epsilon = +inf yields vacuous fairness rows.
FairnessProgram build_fair_lp(const EmpiricalMoments& m, double epsilon);

// minimize t subject to |happiness gap_i| <= t and expected accuracy >= alpha.
FairnessProgram build_gap_lp(const EmpiricalMoments& m, double alpha);

// Throws SolverError if the solution is not optimal or its rows are not
// distributions (|sum - 1| > 1e-6 or entries below -1e-9).
PostProcessor extract_postprocessor(const FairnessProgram& fp, const LPSolution& sol);

} // namespace hfair
