#include "hfair/postprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "hfair/error.hpp"
#include "hfair/rng.hpp"

namespace hfair {

std::vector<double> apply(const PostProcessor& pp, std::span<const double> p_hat, int z) {
    const std::size_t k = pp.label_count();
    if (p_hat.size() != k) throw ArgumentError("prediction length does not match post-processor");
    std::vector<double> out(k, 0.0);
    for (Label yh = 0; yh < k; ++yh) {
        const auto row = pp.row(yh, z);
        for (Label yt = 0; yt < k; ++yt) out[yt] += p_hat[yh] * row[yt];
    }
    return out;
}

double expected_loss(const PostProcessor& pp, const EmpiricalMoments& m) {
    const std::size_t k = m.label_count();
    if (pp.label_count() != k) throw ArgumentError("post-processor and moments disagree on labels");
    double correct = 0.0;
    for (Label y = 0; y < k; ++y) {
        for (Label yh = 0; yh < k; ++yh) {
            for (int z = 0; z < 2; ++z) correct += m.joint(yh, y, z) * pp.prob(y, yh, z);
        }
    }
    return 1.0 - correct;
}

std::vector<double> happiness_gap(const PostProcessor& pp, const EmpiricalMoments& m) {
    const std::size_t k = m.label_count();
    if (pp.label_count() != k) throw ArgumentError("post-processor and moments disagree on labels");
    std::vector<double> gap(m.dim(), 0.0);
    for (Label yt = 0; yt < k; ++yt) {
        for (Label yh = 0; yh < k; ++yh) {
            const double w0 = pp.prob(yt, yh, 0);
            const double w1 = pp.prob(yt, yh, 1);
            const auto xi0 = m.xi(yt, yh, 0);
            const auto xi1 = m.xi(yt, yh, 1);
            for (std::size_t i = 0; i < gap.size(); ++i) gap[i] += xi0[i] * w0 - xi1[i] * w1;
        }
    }
    return gap;
}

double inf_norm(std::span<const double> v) {
    double r = 0.0;
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
}

namespace {

Label draw(std::span<const double> p, double u) {
    double acc = 0.0;
    for (Label i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return i;
    }
    // u landed in the rounding slack above the total; take the last non-zero entry
    for (Label i = p.size(); i-- > 0;) {
        if (p[i] > 0.0) return i;
    }
    return 0;
}

} // namespace

Label sample_label(const PostProcessor& pp, std::span<const double> p_hat, int z, std::uint64_t seed) {
    if (p_hat.size() != pp.label_count()) throw ArgumentError("prediction length does not match post-processor");
    CounterRng rng(seed);
    const Label yhat = draw(p_hat, rng.uniform());
    return draw(pp.row(yhat, z), rng.uniform());
}

FitResult fit_epsilon(const EmpiricalMoments& m, double epsilon) {
    const auto fp = build_fair_lp(m, epsilon);
    const auto sol = solve_lp(fp.program);
    FitResult r;
    r.status = sol.status;
    if (sol.status == LpStatus::Optimal) {
        r.postprocessor = extract_postprocessor(fp, sol);
        r.objective = sol.objective;
    }
    return r;
}

FitResult fit_alpha(const EmpiricalMoments& m, double alpha) {
    const auto fp = build_gap_lp(m, alpha);
    const auto sol = solve_lp(fp.program);
    FitResult r;
    r.status = sol.status;
    if (sol.status != LpStatus::Optimal) return r;
    r.objective = sol.objective;
    r.postprocessor = extract_postprocessor(fp, sol);

    // Tie-break among the fairest post-processors by accuracy.
    const double slack = 1e-9 * (1.0 + sol.objective);
    const auto refined = fit_epsilon(m, sol.objective + slack);
    if (refined.status == LpStatus::Optimal &&
        expected_accuracy(refined.postprocessor, m) >= expected_accuracy(r.postprocessor, m)) {
        r.postprocessor = refined.postprocessor;
    }
    return r;
}

const char* to_string(SweepMode mode) { return mode == SweepMode::Epsilon ? "eps" : "alpha"; }

const char* to_string(PointStatus status) {
    switch (status) {
    case PointStatus::Optimal: return "optimal";
    case PointStatus::Infeasible: return "infeasible";
    case PointStatus::SolverFailure: return "solver_failure";
    }
    return "unknown";
}

bool SweepResult::solver_failed() const {
    return std::any_of(validation.points.begin(), validation.points.end(),
                       [](const TradeoffPoint& p) { return p.status == PointStatus::SolverFailure; });
}

SweepResult sweep(const EmpiricalMoments& m_fit, const EmpiricalMoments& m_eval_val,
                  const EmpiricalMoments& m_eval_test, std::span<const double> grid, SweepMode mode) {
    if (grid.empty()) throw ArgumentError("sweep grid is empty");
    if (!std::is_sorted(grid.begin(), grid.end())) throw ArgumentError("sweep grid must be sorted");
    if (m_eval_val.label_count() != m_fit.label_count() || m_eval_test.label_count() != m_fit.label_count()) {
        throw ArgumentError("fitting and evaluation moments disagree on labels");
    }

    SweepResult result;
    result.validation = {mode, "validation", {}};
    result.test = {mode, "test", {}};
    const double nan = std::numeric_limits<double>::quiet_NaN();

    for (double value : grid) {
        FitResult fit;
        try {
            fit = mode == SweepMode::Epsilon ? fit_epsilon(m_fit, value) : fit_alpha(m_fit, value);
        } catch (const SolverError&) {
            fit.status = LpStatus::IterationLimit;
        }
        auto evaluate_on = [&](const EmpiricalMoments& m) {
            TradeoffPoint p;
            p.constraint_value = value;
            p.fit_value = fit.objective;
            if (fit.status == LpStatus::Optimal) {
                p.accuracy = expected_accuracy(fit.postprocessor, m);
                p.gap = happiness_gap(fit.postprocessor, m);
                p.gap_inf_norm = inf_norm(p.gap);
                p.status = PointStatus::Optimal;
            } else {
                p.accuracy = nan;
                p.gap.assign(m.dim(), nan);
                p.gap_inf_norm = nan;
                p.fit_value = nan;
                p.status = fit.status == LpStatus::Infeasible ? PointStatus::Infeasible : PointStatus::SolverFailure;
            }
            return p;
        };
        result.validation.points.push_back(evaluate_on(m_eval_val));
        result.test.points.push_back(evaluate_on(m_eval_test));
        result.fits.push_back(std::move(fit));
    }
    return result;
}

std::vector<double> default_epsilon_grid(const EmpiricalMoments& m, std::size_t points) {
    if (points < 2) throw ArgumentError("grid needs at least two points");
    const auto fit = fit_epsilon(m, std::numeric_limits<double>::infinity());
    if (fit.status != LpStatus::Optimal) throw SolverError("unconstrained fit failed");
    const double top = inf_norm(happiness_gap(fit.postprocessor, m));
    if (top == 0.0) return {0.0};
    std::vector<double> grid;
    const double lo = std::log(1e-4 * top);
    const double hi = std::log(top);
    for (std::size_t i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        grid.push_back(i + 1 == points ? top : std::exp(lo + t * (hi - lo)));
    }
    return grid;
}

std::vector<double> default_alpha_grid(const EmpiricalMoments& m, std::size_t points) {
    if (points < 2) throw ArgumentError("grid needs at least two points");
    const std::size_t k = m.label_count();
    double chance = 0.0;
    for (Label y = 0; y < k; ++y) {
        double py = 0.0;
        for (Label yh = 0; yh < k; ++yh) {
            for (int z = 0; z < 2; ++z) py += m.joint(yh, y, z);
        }
        chance = std::max(chance, py);
    }
    const auto fit = fit_epsilon(m, std::numeric_limits<double>::infinity());
    if (fit.status != LpStatus::Optimal) throw SolverError("unconstrained fit failed");
    // stay clear of the feasibility boundary at the top of the range
    const double best = std::max(chance, 1.0 - fit.objective - 1e-10);
    std::vector<double> grid;
    for (std::size_t i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        grid.push_back(std::clamp(chance + t * (best - chance), 0.0, 1.0));
    }
    return grid;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

void write_curve_csv(std::ostream& out, const TradeoffCurve& curve) {
    std::size_t n = 0;
    for (const auto& p : curve.points) n = std::max(n, p.gap.size());
    out << "mode,constraint,accuracy";
    for (std::size_t i = 0; i < n; ++i) out << ",gap_" << i;
    out << ",gap_inf,dataset_tag,status\n";
    for (const auto& p : curve.points) {
        out << to_string(curve.mode) << ',' << format_number(p.constraint_value) << ',' << format_number(p.accuracy);
        for (double g : p.gap) out << ',' << format_number(g);
        out << ',' << format_number(p.gap_inf_norm) << ',' << curve.dataset_tag << ',' << to_string(p.status) << '\n';
    }
}

} // namespace hfair
