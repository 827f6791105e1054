#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hfair/estimators.hpp"
#include "hfair/fair_lp.hpp"

namespace hfair {

// p(ytilde) = sum_yhat p_hat(yhat) pp(ytilde | yhat, z)
std::vector<double> apply(const PostProcessor& pp, std::span<const double> p_hat, int z);

double expected_loss(const PostProcessor& pp, const EmpiricalMoments& m);
inline double expected_accuracy(const PostProcessor& pp, const EmpiricalMoments& m) {
    return 1.0 - expected_loss(pp, m);
}

// E[eta(Ytilde, X, Y, Z) | Z=0] - E[eta(Ytilde, X, Y, Z) | Z=1], per component.
std::vector<double> happiness_gap(const PostProcessor& pp, const EmpiricalMoments& m);

double inf_norm(std::span<const double> v);

// Draws yhat ~ p_hat, then ytilde ~ pp(. | yhat, z).
Label sample_label(const PostProcessor& pp, std::span<const double> p_hat, int z, std::uint64_t seed);

struct FitResult {
    LpStatus status = LpStatus::Infeasible;
    PostProcessor postprocessor;
    double objective = 0.0; // loss for epsilon fits, t* for alpha fits
};

// Solve the loss-minimizing LP at the given epsilon.
FitResult fit_epsilon(const EmpiricalMoments& m, double epsilon);

// Solve the gap-minimizing LP at accuracy >= alpha, then among post-processors
// with gap <= t* pick one of maximal accuracy.
FitResult fit_alpha(const EmpiricalMoments& m, double alpha);

enum class SweepMode { Epsilon, Alpha };
const char* to_string(SweepMode mode);

enum class PointStatus { Optimal, Infeasible, SolverFailure };
const char* to_string(PointStatus status);

struct TradeoffPoint {
    double constraint_value = 0.0;
    double accuracy = 0.0;
    std::vector<double> gap;
    double gap_inf_norm = 0.0;
    double fit_value = 0.0; // LP objective on the fitting moments
    PointStatus status = PointStatus::Optimal;
};

struct TradeoffCurve {
    SweepMode mode = SweepMode::Epsilon;
    std::string dataset_tag;
    std::vector<TradeoffPoint> points;
};

struct SweepResult {
    TradeoffCurve validation;
    TradeoffCurve test;
    std::vector<FitResult> fits; // one per grid value
    bool solver_failed() const;
};

// For each grid value, fit on m_fit and evaluate accuracy and gap on the two
// evaluation moment sets. The grid must be non-empty and sorted ascending.
SweepResult sweep(const EmpiricalMoments& m_fit, const EmpiricalMoments& m_eval_val,
                  const EmpiricalMoments& m_eval_test, std::span<const double> grid, SweepMode mode);

// points log-spaced values from 1e-4 G to G, G = gap of the unconstrained optimum.
std::vector<double> default_epsilon_grid(const EmpiricalMoments& m, std::size_t points = 50);
// points linear values from the majority-class rate to the best achievable accuracy.
std::vector<double> default_alpha_grid(const EmpiricalMoments& m, std::size_t points = 50);

// Header: mode,constraint,accuracy,gap_0..gap_{n-1},gap_inf,dataset_tag,status
void write_curve_csv(std::ostream& out, const TradeoffCurve& curve);

std::string format_number(double v);

} // namespace hfair
