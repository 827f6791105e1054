// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "../lp_oracle.hpp"
#include "hfair/cli.hpp"
#include "hfair/criteria.hpp"
#include "hfair/csv.hpp"
#include "hfair/data.hpp"
#include "hfair/estimators.hpp"
#include "hfair/fair_lp.hpp"
#include "hfair/forest.hpp"
#include "hfair/postprocess.hpp"
#include "hfair/rng.hpp"

using namespace hfair;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr std::uint64_t kBoundExpected = 10596;
constexpr double kBoundSeconds = 1e-3;
constexpr int kRecoverySets = 200;
constexpr int kRecoveryEps = 20;
constexpr double kRecoveryTol = 1e-12;
constexpr double kRecoverySeconds = 10.0;
constexpr int kLpSets = 100;
constexpr double kLpObjectiveTol = 1e-4;
constexpr double kLpResidualTol = 1e-8;
constexpr double kLpSeconds = 60.0;
constexpr double kMonotoneTol = 1e-9;
constexpr std::size_t kSyntheticRows = 48842;
constexpr std::uint64_t kSyntheticSeed = 0;
constexpr double kBaselineLo = 0.80;
constexpr double kBaselineHi = 0.86;
constexpr double kFundingGapTarget = 2000.0;
constexpr double kAccuracyDrop = 0.02;
constexpr double kUnfairFloor = 15000.0;
constexpr double kEndpointGapLo = 15000.0;
constexpr double kEndpointGapHi = 40000.0;
constexpr double kEndpointAccLo = 0.75;
constexpr double kEndpointAccHi = 0.83;
constexpr double kSyntheticSeconds = 180.0;
constexpr int kResamples = 50;
constexpr std::size_t kResampleSize = 2000;
constexpr double kApproxSlack = 1e-9;
constexpr double kApproxSeconds = 30.0;
constexpr int kIdentitySets = 100;
constexpr double kIdentityTol = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 6) {
    std::ostringstream ss;
    ss.precision(digits);
    ss << v;
    return ss.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs the hfair executable, returns its exit status and stdout.
std::pair<int, std::string> hfair_cli(const std::string& args, const fs::path& dir) {
    const auto out = dir / "stdout.txt";
    const std::string cmd = "\"" + std::string(HFAIR_CLI_PATH) + "\" " + args + " > \"" + out.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return {status, slurp(out)};
}

using Row = std::map<std::string, std::string>;

std::vector<Row> read_table(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    const auto header = split_csv_line(line);
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        Row r;
        for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) r[header[i]] = cells[i];
        rows.push_back(std::move(r));
    }
    return rows;
}

double num(const Row& r, const std::string& key) { return std::stod(r.at(key)); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::vector<double> random_distribution(CounterRng& rng, std::size_t k) {
    std::vector<double> p(k);
    double s = 0.0;
    for (auto& v : p) s += (v = static_cast<double>(rng.integer(0, 8)));
    if (s == 0.0) {
        p[0] = s = 1.0;
    }
    for (auto& v : p) v /= s;
    return p;
}

PostProcessor random_postprocessor(CounterRng& rng, std::size_t k) {
    std::vector<double> table;
    for (std::size_t row = 0; row < 2 * k; ++row) {
        const auto p = random_distribution(rng, k);
        table.insert(table.end(), p.begin(), p.end());
    }
    return PostProcessor(k, std::move(table));
}

// A finite distribution over (y, z, p_hat) atoms with integer multiplicities,
// with every (y, z) cell populated.
struct Atom {
    Label y;
    int z;
    std::vector<double> p_hat;
    int mult;
};

std::vector<Atom> random_atoms(CounterRng& rng, std::size_t k) {
    std::vector<Atom> atoms;
    const std::size_t count = 2 * k + rng.index(6);
    for (std::size_t i = 0; i < count; ++i) {
        const Label y = i < 2 * k ? i % k : rng.index(k);
        const int z = i < 2 * k ? static_cast<int>(i / k) : static_cast<int>(rng.index(2));
        atoms.push_back({y, z, random_distribution(rng, k), static_cast<int>(rng.integer(1, 5))});
    }
    return atoms;
}

Dataset expand(const std::vector<Atom>& atoms, std::size_t k) {
    Dataset d{LabelSpace::numbered(k), FeatureSchema(), {}};
    for (const auto& a : atoms) {
        for (int r = 0; r < a.mult; ++r) d.samples.push_back({{}, a.y, a.z, a.p_hat});
    }
    return d;
}

// Distribution of the post-processed label for one atom.
std::vector<double> post_label(const Atom& a, const PostProcessor& pp) {
    return apply(pp, a.p_hat, a.z);
}

// P(Ytilde = j | Z = z, and Y = y if y >= 0), straight from the atoms.
double direct_rate(const std::vector<Atom>& atoms, const PostProcessor& pp, Label j, int z, long y = -1) {
    double num = 0.0, den = 0.0;
    for (const auto& a : atoms) {
        if (a.z != z || (y >= 0 && a.y != static_cast<Label>(y))) continue;
        num += a.mult * post_label(a, pp)[j];
        den += a.mult;
    }
    return num / den;
}

double direct_accuracy(const std::vector<Atom>& atoms, const PostProcessor& pp, int z) {
    double num = 0.0, den = 0.0;
    for (const auto& a : atoms) {
        if (a.z != z) continue;
        num += a.mult * post_label(a, pp)[a.y];
        den += a.mult;
    }
    return num / den;
}

// ---------------------------------------------------------------------------

Outcome criterion_bound(const fs::path& dir) {
    const auto t0 = Clock::now();
    const auto d = sample_size_bound(0.01, 0.02, 1.0, 2, 2);
    const double lib_seconds = seconds_since(t0);
    const auto [status, out] = hfair_cli("bound --gamma 0.01 --delta 0.02 --C 1 --n 2 --labels 2", dir);
    const bool ok = d == kBoundExpected && status == 0 && out == std::to_string(kBoundExpected) + "\n" &&
                    lib_seconds < kBoundSeconds;
    return {ok, "D=" + std::to_string(d) + ", cli prints " + out.substr(0, out.find('\n')) + ", library call " +
                    fmt(lib_seconds * 1e6, 3) + " us"};
}

Outcome criterion_recovery() {
    CounterRng rng(2024);
    double worst = 0.0;
    int disagreements = 0;
    for (int set = 0; set < kRecoverySets; ++set) {
        const std::size_t k = 2 + static_cast<std::size_t>(set % 2);
        const auto atoms = random_atoms(rng, k);
        const auto d = expand(atoms, k);
        const auto pp = set % 10 == 0 ? PostProcessor::identity(k) : random_postprocessor(rng, k);

        // Direct gaps, component order matching the constructed happiness.
        std::vector<double> sp, eo;
        for (Label j = 0; j < k; ++j) sp.push_back(direct_rate(atoms, pp, j, 0) - direct_rate(atoms, pp, j, 1));
        for (Label y = 0; y < k; ++y) {
            for (Label j = 0; j < k; ++j) {
                eo.push_back(direct_rate(atoms, pp, j, 0, static_cast<long>(y)) -
                             direct_rate(atoms, pp, j, 1, static_cast<long>(y)));
            }
        }
        const std::vector<double> oa{direct_accuracy(atoms, pp, 0) - direct_accuracy(atoms, pp, 1)};

        const std::vector<std::pair<HappinessSpec, std::vector<double>>> cases{
            {statistical_parity_happiness(d.label_space), sp},
            {overall_accuracy_happiness(), oa},
            {equalized_odds_happiness(d.label_space, estimate_label_given_group(d)), eo},
        };
        for (const auto& [spec, direct] : cases) {
            const auto gap = happiness_gap(pp, estimate_moments(d, spec));
            for (std::size_t i = 0; i < gap.size(); ++i) worst = std::max(worst, std::abs(gap[i] - direct[i]));
            const double phi = inf_norm(gap);
            const double want = inf_norm(direct);
            for (int e = 0; e < kRecoveryEps; ++e) {
                const double eps = want * e / 10.0 + (want == 0.0 ? 0.05 * e : 0.0);
                const bool fair_eta = phi <= eps;
                const bool fair_direct = want <= eps;
                if (fair_eta != fair_direct && std::abs(eps - want) > kRecoveryTol) ++disagreements;
            }
        }
    }
    return {worst <= kRecoveryTol && disagreements == 0,
            std::to_string(kRecoverySets) + " distributions x 3 criteria x " + std::to_string(kRecoveryEps) +
                " eps, max gap difference " + fmt(worst, 3) + ", disagreements " + std::to_string(disagreements)};
}

double worst_violation(const LinearProgram& lp, const std::vector<double>& x) {
    double worst = 0.0;
    for (double v : x) worst = std::max(worst, -v);
    auto dot = [&](const std::vector<double>& row) {
        double s = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * x[j];
        return s;
    };
    for (std::size_t i = 0; i < lp.a_eq.size(); ++i) worst = std::max(worst, std::abs(dot(lp.a_eq[i]) - lp.b_eq[i]));
    for (std::size_t i = 0; i < lp.a_ub.size(); ++i) worst = std::max(worst, dot(lp.a_ub[i]) - lp.b_ub[i]);
    return worst;
}

EmpiricalMoments random_binary_moments(CounterRng& rng) {
    EmpiricalMoments m(2, 1);
    double total = 0.0;
    for (Label a = 0; a < 2; ++a)
        for (Label b = 0; b < 2; ++b)
            for (int z = 0; z < 2; ++z) total += (m.joint(a, b, z) = rng.uniform());
    for (Label a = 0; a < 2; ++a)
        for (Label b = 0; b < 2; ++b)
            for (int z = 0; z < 2; ++z) {
                m.joint(a, b, z) /= total;
                m.xi(a, b, z)[0] = 2.0 * rng.uniform() - 1.0;
            }
    return m;
}

Outcome criterion_lp() {
    CounterRng rng(77);
    double worst_obj = 0.0, worst_res = 0.0;
    int mismatches = 0, infeasible = 0;
    for (int set = 0; set < kLpSets; ++set) {
        const auto m = random_binary_moments(rng);
        const double eps = 0.3 * rng.uniform();
        const double alpha = (0.5 + 0.5 * rng.uniform()) * oracle::max_accuracy(m);

        const auto fair = build_fair_lp(m, eps).program;
        const auto s1 = solve_lp(fair);
        const auto want1 = oracle::fair_loss(m, eps);
        if (!want1) {
            ++infeasible;
            if (s1.status != LpStatus::Infeasible) ++mismatches;
        } else if (s1.status != LpStatus::Optimal) {
            ++mismatches;
        } else {
            worst_obj = std::max(worst_obj, std::abs(s1.objective - *want1));
            worst_res = std::max(worst_res, worst_violation(fair, s1.values));
        }

        const auto gap = build_gap_lp(m, alpha).program;
        const auto s2 = solve_lp(gap);
        const auto want2 = oracle::min_gap(m, alpha);
        if (!want2 || s2.status != LpStatus::Optimal) {
            ++mismatches;
        } else {
            worst_obj = std::max(worst_obj, std::abs(s2.objective - *want2));
            worst_res = std::max(worst_res, worst_violation(gap, s2.values));
        }
    }
    return {mismatches == 0 && worst_obj <= kLpObjectiveTol && worst_res <= kLpResidualTol,
            std::to_string(kLpSets) + " sets x 2 programs, max objective error " + fmt(worst_obj, 3) +
                ", max residual " + fmt(worst_res, 3) + ", status mismatches " + std::to_string(mismatches) +
                ", infeasible eps " + std::to_string(infeasible)};
}

// Fit value along a sweep: loss nonincreasing in eps, t* nondecreasing in alpha.
int monotone_violations(const SweepResult& r, SweepMode mode) {
    int bad = 0;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (const auto& p : r.validation.points) {
        if (p.status != PointStatus::Optimal) continue;
        const double v = p.fit_value;
        if (!std::isnan(prev)) {
            const double tol = kMonotoneTol * std::max(1.0, std::abs(prev));
            if (mode == SweepMode::Epsilon ? v > prev + tol : v < prev - tol) ++bad;
        }
        prev = v;
    }
    return bad;
}

Outcome criterion_monotone(const DatasetSplit& s) {
    int sweeps = 0, bad = 0;
    for (const char* name : {"equal-funding", "statistical-parity", "equalized-odds", "overall-accuracy"}) {
        const auto spec = cli::happiness_by_name(name, s.validation);
        const auto m_val = estimate_moments(s.validation, spec);
        const auto m_test = estimate_moments(s.test, spec);
        for (auto mode : {SweepMode::Epsilon, SweepMode::Alpha}) {
            const auto grid = mode == SweepMode::Epsilon ? default_epsilon_grid(m_val) : default_alpha_grid(m_val);
            bad += monotone_violations(sweep(m_val, m_val, m_test, grid, mode), mode);
            ++sweeps;
        }
    }
    CounterRng rng(5);
    for (int set = 0; set < 20; ++set) {
        const auto m = random_binary_moments(rng);
        for (auto mode : {SweepMode::Epsilon, SweepMode::Alpha}) {
            const auto grid = mode == SweepMode::Epsilon ? default_epsilon_grid(m, 20) : default_alpha_grid(m, 20);
            bad += monotone_violations(sweep(m, m, m, grid, mode), mode);
            ++sweeps;
        }
    }
    return {bad == 0, std::to_string(sweeps) + " sweeps, violations " + std::to_string(bad)};
}

struct Curve {
    std::vector<Row> validation;
    std::vector<Row> test;
};

Curve read_curve(const fs::path& prefix) {
    return {read_table(slurp(prefix.string() + "_validation.csv")), read_table(slurp(prefix.string() + "_test.csv"))};
}

// Test curve decides; validation numbers are reported alongside.
Outcome criterion_synthetic(const fs::path& dir, double& elapsed) {
    const auto t0 = Clock::now();
    const auto data = (dir / "synthetic.csv").string();
    const auto model = (dir / "model.json").string();
    const auto preds = (dir / "predictions.csv").string();
    const std::string seed = " --seed " + std::to_string(kSyntheticSeed);
    const std::string common = " --data \"" + data + "\" --predictions \"" + preds + "\"" + seed;

    std::vector<std::string> steps{
        "generate --count " + std::to_string(kSyntheticRows) + seed + " --out \"" + data + "\"",
        "train --data \"" + data + "\"" + seed + " --out \"" + model + "\"",
        "predict --data \"" + data + "\" --model \"" + model + "\" --out \"" + preds + "\"",
        "sweep" + common + " --criterion equal-funding --mode alpha --out \"" + (dir / "ef").string() + "\"",
        "sweep" + common + " --criterion statistical-parity --measure equal-funding --mode alpha --out \"" +
            (dir / "sp").string() + "\"",
        "sweep" + common + " --criterion equalized-odds --measure equal-funding --mode alpha --out \"" +
            (dir / "eo").string() + "\"",
        "sweep" + common + " --criterion equalized-odds --mode alpha --out \"" + (dir / "eo_own").string() + "\"",
    };
    for (const auto& step : steps) {
        const auto [status, out] = hfair_cli(step, dir);
        if (status != 0) return {false, "command failed: hfair " + step + "\n" + out};
    }
    const auto [status, eval_out] = hfair_cli("evaluate" + common + " --criterion equal-funding", dir);
    if (status != 0) return {false, "evaluate failed: " + eval_out};
    elapsed = seconds_since(t0);

    double baseline = 0.0, baseline_gap = 0.0;
    for (const auto& r : read_table(eval_out)) {
        if (r.at("dataset_tag") == "test") {
            baseline = num(r, "accuracy");
            baseline_gap = num(r, "gap_0");
        }
    }

    auto optimal = [](const std::vector<Row>& rows) {
        std::vector<Row> out;
        for (const auto& r : rows) {
            if (r.at("status") == "optimal") out.push_back(r);
        }
        return out;
    };

    // Equal funding: some point with a small gap close to the best accuracy.
    auto fair_point = [&](const std::vector<Row>& rows, double& best_acc, double& acc_at, double& gap_at) {
        best_acc = 0.0;
        for (const auto& r : rows) best_acc = std::max(best_acc, num(r, "accuracy"));
        bool found = false;
        gap_at = std::numeric_limits<double>::infinity();
        for (const auto& r : rows) {
            const double g = std::abs(num(r, "gap_0"));
            const double a = num(r, "accuracy");
            if (a >= best_acc - kAccuracyDrop && g < gap_at) {
                gap_at = g;
                acc_at = a;
                found = found || g <= kFundingGapTarget;
            }
        }
        return found;
    };
    const auto ef = read_curve(dir / "ef");
    double best_t = 0, acc_t = 0, gap_t = 0, best_v = 0, acc_v = 0, gap_v = 0;
    const bool ef_ok = fair_point(optimal(ef.test), best_t, acc_t, gap_t);
    fair_point(optimal(ef.validation), best_v, acc_v, gap_v);

    auto min_abs_gap = [&](const std::vector<Row>& rows) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& r : rows) m = std::min(m, std::abs(num(r, "gap_0")));
        return m;
    };
    const auto sp = read_curve(dir / "sp");
    const auto eo = read_curve(dir / "eo");
    const double sp_min = min_abs_gap(optimal(sp.test));
    const double eo_min = min_abs_gap(optimal(eo.test));
    const bool unfair_ok = sp_min >= kUnfairFloor && eo_min >= kUnfairFloor;

    // Equalized-odds endpoint: the fairest (lowest alpha) point.
    const auto eo_test = optimal(eo.test);
    const double end_acc = eo_test.empty() ? 0.0 : num(eo_test.front(), "accuracy");
    const double end_gap = eo_test.empty() ? 0.0 : std::abs(num(eo_test.front(), "gap_0"));
    const bool end_ok = end_acc >= kEndpointAccLo && end_acc <= kEndpointAccHi && end_gap >= kEndpointGapLo &&
                        end_gap <= kEndpointGapHi;

    const bool base_ok = baseline >= kBaselineLo && baseline <= kBaselineHi;
    const bool time_ok = elapsed < kSyntheticSeconds;

    std::ostringstream d;
    d << "\n    baseline test soft accuracy " << fmt(baseline, 4) << " [" << (base_ok ? "ok" : "out of band")
      << "], baseline test funding gap " << fmt(baseline_gap, 6) << "\n    equal funding, test: smallest |gap| "
      << fmt(gap_t, 6) << " at accuracy " << fmt(acc_t, 4) << " (best " << fmt(best_t, 4) << ") ["
      << (ef_ok ? "ok" : "above $2000") << "]; validation: " << fmt(gap_v, 3) << " at " << fmt(acc_v, 4)
      << " (best " << fmt(best_v, 4) << ")\n    smallest test funding gap under statistical parity "
      << fmt(sp_min, 6) << ", under equalized odds " << fmt(eo_min, 6) << " [" << (unfair_ok ? "ok" : "below floor")
      << "]\n    equalized-odds endpoint: accuracy " << fmt(end_acc, 4) << ", funding gap " << fmt(end_gap, 6) << " ["
      << (end_ok ? "ok" : "out of band") << "]\n    pipeline runtime " << fmt(elapsed, 3) << " s";
    return {base_ok && ef_ok && unfair_ok && end_ok && time_ok, d.str()};
}

// Hand-built population: 8 feature atoms with y counts; happiness ytilde * w.
struct PopulationAtom {
    double w;
    int z;
    int count_y0;
    int count_y1;
    double p1;
};

const std::vector<PopulationAtom> kPopulation{
    {0.10, 0, 30, 10, 0.20}, {0.35, 0, 20, 25, 0.55}, {0.60, 0, 10, 40, 0.80}, {0.90, 0, 25, 5, 0.30},
    {0.15, 1, 40, 5, 0.10},  {0.40, 1, 15, 20, 0.60}, {0.70, 1, 20, 10, 0.45}, {1.00, 1, 5, 30, 0.90},
};

Outcome criterion_approx() {
    Dataset population{LabelSpace::numbered(2), FeatureSchema({{"w", FeatureKind::Numeric, {}}}), {}};
    for (const auto& a : kPopulation) {
        for (int i = 0; i < a.count_y0; ++i) population.samples.push_back({{a.w}, 0, a.z, {1.0 - a.p1, a.p1}});
        for (int i = 0; i < a.count_y1; ++i) population.samples.push_back({{a.w}, 1, a.z, {1.0 - a.p1, a.p1}});
    }
    const HappinessSpec spec("funded", {{"funded", HappinessSpec::Builtin([](const HappinessArgs& s) {
                                              return s.x[0] * static_cast<double>(s.yhat);
                                          })}});
    const auto exact = estimate_moments(population, spec);
    const auto unconstrained = fit_epsilon(exact, std::numeric_limits<double>::infinity());
    const double top = inf_norm(happiness_gap(unconstrained.postprocessor, exact));

    CounterRng rng(31);
    int checks = 0, violations = 0, wide_checks = 0, wide_violations = 0;
    double worst_margin = std::numeric_limits<double>::infinity(), max_delta = 0.0;
    for (int r = 0; r < kResamples; ++r) {
        Dataset sample{population.label_space, population.schema, {}};
        for (std::size_t i = 0; i < kResampleSize; ++i) {
            sample.samples.push_back(population.samples[rng.index(population.size())]);
        }
        const auto est = estimate_moments(sample, spec);
        const double delta = exact.max_deviation(est);
        max_delta = std::max(max_delta, delta);
        for (int e = 0; e <= 10; ++e) {
            const double eps = 2.0 * delta + top * e / 10.0;
            const auto hat = fit_epsilon(est, eps - 2.0 * delta);
            if (hat.status != LpStatus::Optimal) continue; // right-hand side is infinite
            const auto truth = fit_epsilon(exact, eps);
            ++checks;
            const double margin = truth.status == LpStatus::Optimal
                                      ? hat.objective + delta - truth.objective
                                      : -std::numeric_limits<double>::infinity();
            worst_margin = std::min(worst_margin, margin);
            if (margin < -kApproxSlack) ++violations;
        }
        // Reported only: the same statement with the substitution error
        // summed over all |Y| terms of both groups, 2 |Y| delta.
        const double wide = 2.0 * static_cast<double>(population.label_space.size()) * delta;
        for (int e = 0; e <= 10; ++e) {
            const double eps = wide + top * e / 10.0;
            const auto hat = fit_epsilon(est, eps - wide);
            if (hat.status != LpStatus::Optimal) continue;
            const auto truth = fit_epsilon(exact, eps);
            ++wide_checks;
            if (truth.status != LpStatus::Optimal || truth.objective > hat.objective + wide + kApproxSlack) {
                ++wide_violations;
            }
        }
    }
    return {violations == 0, std::to_string(checks) + " (resample, eps) checks, violations " +
                                 std::to_string(violations) + ", smallest margin " + fmt(worst_margin, 3) +
                                 ", largest delta " + fmt(max_delta, 3) + "; with 2|Y| delta in place of 2 delta and delta: " +
                                 std::to_string(wide_violations) + " violations in " + std::to_string(wide_checks)};
}

Outcome criterion_identity() {
    CounterRng rng(4242);
    double worst = 0.0;
    for (int set = 0; set < kIdentitySets; ++set) {
        const std::size_t k = 2 + static_cast<std::size_t>(set % 2);
        const auto atoms = random_atoms(rng, k);
        const auto d = expand(atoms, k);
        const auto pp = set % 10 == 0 ? PostProcessor::identity(k) : random_postprocessor(rng, k);
        const auto m = estimate_moments(d, equalized_odds_happiness(d.label_space, estimate_label_given_group(d)));
        for (int z = 0; z < 2; ++z) {
            for (Label y = 0; y < k; ++y) {
                for (Label j = 0; j < k; ++j) {
                    double e = 0.0;
                    for (Label yt = 0; yt < k; ++yt) {
                        for (Label yh = 0; yh < k; ++yh) e += m.xi(yt, yh, z)[y * k + j] * pp.prob(yt, yh, z);
                    }
                    worst = std::max(worst, std::abs(e - direct_rate(atoms, pp, j, z, static_cast<long>(y))));
                }
            }
        }
    }
    return {worst <= kIdentityTol, std::to_string(kIdentitySets) + " distributions, max deviation " + fmt(worst, 3)};
}

Outcome criterion_determinism(const fs::path& dir) {
    std::vector<std::string> compared;
    std::vector<std::string> differing;
    std::vector<fs::path> runs{dir / "run_a", dir / "run_b"};
    for (const auto& run : runs) {
        fs::create_directories(run);
        auto p = [&](const char* f) { return "\"" + (run / f).string() + "\""; };
        const std::vector<std::string> steps{
            "generate --count 5000 --seed 3 --out " + p("d.csv"),
            "train --data " + p("d.csv") + " --seed 3 --trees 20 --out " + p("m.json"),
            "predict --data " + p("d.csv") + " --model " + p("m.json") + " --out " + p("p.csv"),
            "sweep --data " + p("d.csv") + " --seed 3 --trees 20 --criterion equal-funding --out " + p("ef"),
            "sweep --data " + p("d.csv") + " --seed 3 --predictions " + p("p.csv") +
                " --criterion equalized-odds --mode eps --points 20 --out " + p("eo"),
            "evaluate --data " + p("d.csv") + " --seed 3 --model " + p("m.json") +
                " --criterion statistical-parity --out " + p("eval.csv"),
        };
        for (const auto& step : steps) {
            const auto [status, out] = hfair_cli(step, run);
            if (status != 0) return {false, "command failed: hfair " + step + "\n" + out};
        }
    }
    for (const auto& entry : fs::directory_iterator(runs[0])) {
        const auto name = entry.path().filename().string();
        if (entry.path().extension() != ".csv" && entry.path().extension() != ".json") continue;
        compared.push_back(name);
        if (slurp(entry.path()) != slurp(runs[1] / name)) differing.push_back(name);
    }
    std::string diff;
    for (const auto& f : differing) diff += " " + f;
    return {differing.empty() && compared.size() >= 8,
            std::to_string(compared.size()) + " output files compared, differing:" + (diff.empty() ? " none" : diff)};
}

DatasetSplit load_synthetic(const fs::path& dir) {
    const auto data = dir / "synthetic.csv";
    const auto layout = layout_from_json(slurp(data.string() + ".schema.json"));
    auto d = load_csv(data, layout);
    const auto preds = load_predictions(dir / "predictions.csv", d.label_space.size());
    for (std::size_t i = 0; i < d.size(); ++i) d.samples[i].p_hat = preds[i];
    const auto idx = split_indices(d.size(), kSyntheticSeed);
    return {d.subset(idx.train), d.subset(idx.validation), d.subset(idx.test)};
}

} // namespace

int main() {
    const fs::path dir = fs::temp_directory_path() / "hfair_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    bool all = true;
    auto report = [&](int id, const std::string& name, const std::function<Outcome()>& body, double limit = 0.0) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double t = seconds_since(t0);
        if (limit > 0.0 && t >= limit) {
            o.pass = false;
            o.detail += ", over the " + fmt(limit, 3) + " s limit";
        }
        all = all && o.pass;
        std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << name << " (" << o.detail
                  << "; " << fmt(t, 3) << " s)" << std::endl;
    };

    report(1, "sample-size bound", [&] { return criterion_bound(dir); });
    report(2, "criteria recovery", criterion_recovery, kRecoverySeconds);
    report(3, "LP against grid oracle", criterion_lp, kLpSeconds);

    double synthetic_seconds = 0.0;
    Outcome synthetic;
    try {
        synthetic = criterion_synthetic(dir, synthetic_seconds);
    } catch (const std::exception& e) {
        synthetic = {false, std::string("exception: ") + e.what()};
    }
    report(4, "sweep monotonicity", [&] { return criterion_monotone(load_synthetic(dir)); });
    report(5, "synthetic end-to-end", [&] { return synthetic; });
    report(6, "empirical approximation bound", criterion_approx, kApproxSeconds);
    report(7, "equalized-odds identity", criterion_identity);
    report(8, "CLI determinism", [&] { return criterion_determinism(dir); });

    fs::remove_all(dir);
    return all ? 0 : 1;
}
