#include "hfair/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "hfair/criteria.hpp"
#include "hfair/csv.hpp"
#include "hfair/data.hpp"
#include "hfair/estimators.hpp"
#include "hfair/forest.hpp"
#include "hfair/postprocess.hpp"

namespace hfair::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const char* kCriterionNames =
    "equal-funding, statistical-parity, overall-accuracy, equalized-odds, adult, financial, expr:<text>";

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + p.string() + "'");
    out << content;
    if (!out) throw DataError("failed writing '" + p.string() + "'");
}

std::string schema_sidecar(const std::string& data) { return data + ".schema.json"; }

// CLI11 prints doubles with six significant digits; manifests need them exact.
void exact_default(CLI::Option* opt, double value) { opt->default_str(format_number(value)); }

// Echo of every option of the invoked command; feeding it back through
// --config reproduces the run.
void write_manifest(const CLI::App& root, const std::string& command, const fs::path& path,
                    const std::vector<std::string>& outputs) {
    std::string text = "# hfair " + std::string(kVersion) + "\n";
    for (const auto& o : outputs) text += "# output: " + o + "\n";
    text += "[" + command + "]\n";
    // Unset string options would come back as explicitly given empty values.
    std::istringstream body(root.get_subcommand(command)->config_to_str(true, false));
    std::string line;
    while (std::getline(body, line)) {
        if (line.ends_with("=\"\"") || line.ends_with("=''")) continue;
        text += line + "\n";
    }
    write_file(path, text);
}

struct DataOptions {
    std::string data;
    std::string schema;

    void add(CLI::App* app) {
        app->add_option("--data", data, "Dataset CSV (features, y, z, optional p_*)")->required();
        app->add_option("--schema", schema, "Schema JSON (default: <data>.schema.json if present, else inferred)");
    }

    Dataset load() const {
        DatasetLayout layout;
        if (!schema.empty()) {
            layout = layout_from_json(read_file(schema));
        } else if (fs::exists(schema_sidecar(data))) {
            layout = layout_from_json(read_file(schema_sidecar(data)));
        } else {
            layout = infer_layout(data);
        }
        return load_csv(data, layout);
    }
};

struct ForestOptions {
    ForestConfig cfg;
    bool exclude_group = false;

    void add(CLI::App* app) {
        app->add_option("--trees", cfg.tree_count, "Number of trees")->capture_default_str()->check(CLI::PositiveNumber);
        app->add_option("--depth", cfg.max_depth, "Maximum tree depth")->capture_default_str()->check(CLI::PositiveNumber);
        app->add_option("--min-leaf", cfg.min_leaf, "Minimum samples per leaf")->capture_default_str()->check(CLI::PositiveNumber);
        app->add_option("--mtry", cfg.features_per_split, "Source columns tried per split (0: sqrt of the column count)")->capture_default_str();
        app->add_flag("--exclude-group", exclude_group, "Do not give z to the classifier");
        app->add_option("--exclude-feature", cfg.excluded_features, "Feature columns hidden from the classifier");
    }

    ForestConfig config(std::uint64_t seed) const {
        ForestConfig c = cfg;
        c.seed = seed;
        c.include_group = !exclude_group;
        return c;
    }
};

struct PredictionOptions {
    std::string model;
    std::string predictions;

    void add(CLI::App* app) {
        auto* m = app->add_option("--model", model, "Trained forest (JSON) to score the data with");
        auto* p = app->add_option("--predictions", predictions, "Row-aligned CSV of p_0..p_{K-1} from any classifier");
        m->excludes(p);
    }
};

// Splits d and makes sure validation and test carry soft predictions, training
// a fresh forest on the training split when no other source is given.
DatasetSplit prepare(const Dataset& full, const PredictionOptions& po, const ForestOptions& fo, std::uint64_t seed,
                  std::ostream& out) {
    Dataset d = full;
    if (!po.predictions.empty()) {
        const auto preds = load_predictions(po.predictions, d.label_space.size());
        if (preds.size() != d.size()) {
            throw DataError("predictions file has " + std::to_string(preds.size()) + " rows, dataset has " +
                            std::to_string(d.size()));
        }
        for (std::size_t i = 0; i < d.size(); ++i) d.samples[i].p_hat = preds[i];
    }
    const auto idx = split_indices(d.size(), seed);
    DatasetSplit s{d.subset(idx.train), d.subset(idx.validation), d.subset(idx.test)};
    if (!po.model.empty()) {
        const auto model = load_model(read_file(po.model));
        predict_dataset(model, s.validation);
        predict_dataset(model, s.test);
    } else if (!s.validation.has_predictions() || !s.test.has_predictions()) {
        const auto model = train_forest(s.train, fo.config(seed));
        predict_dataset(model, s.train);
        predict_dataset(model, s.validation);
        predict_dataset(model, s.test);
        const auto identity = PostProcessor::identity(d.label_space.size());
        const auto acc = [&](const Dataset& part) {
            return expected_accuracy(identity, estimate_moments(part, overall_accuracy_happiness()));
        };
        out << "baseline soft accuracy: train " << format_number(acc(s.train)) << ", validation "
            << format_number(acc(s.validation)) << ", test " << format_number(acc(s.test)) << "\n";
    }
    return s;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            grid.push_back(std::stod(item, &used));
            if (item.find_first_not_of(' ', used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("bad grid value '" + item + "'");
        }
    }
    if (grid.empty()) throw UsageError("--grid is empty");
    if (!std::is_sorted(grid.begin(), grid.end())) throw UsageError("--grid must be sorted ascending");
    return grid;
}

int cmd_generate(const CLI::App& root, const SyntheticConfig& cfg, const std::string& out_path, std::ostream& out) {
    const Dataset d = generate_synthetic(cfg);
    std::ostringstream csv;
    write_csv(csv, d);
    write_file(out_path, csv.str());
    write_file(schema_sidecar(out_path), layout_to_json({d.schema, d.label_space}));
    write_manifest(root, "generate", out_path + ".manifest.toml", {out_path, schema_sidecar(out_path)});
    out << "wrote " << d.size() << " rows to " << out_path << "\n";
    return 0;
}

} // namespace

HappinessSpec happiness_by_name(const std::string& name, const Dataset& reference) {
    if (name == "equal-funding") return equal_funding_spec(reference.schema);
    if (name == "statistical-parity") return statistical_parity_happiness(reference.label_space);
    if (name == "overall-accuracy") return overall_accuracy_happiness();
    if (name == "equalized-odds") {
        return equalized_odds_happiness(reference.label_space, estimate_label_given_group(reference));
    }
    if (name == "adult") return adult_happiness_spec(reference.schema);
    if (name == "financial") return financial_happiness_spec(reference.schema);
    if (name.rfind("expr:", 0) == 0) {
        std::vector<std::string> parts;
        std::stringstream ss(name.substr(5));
        std::string part;
        while (std::getline(ss, part, ';')) parts.push_back(part);
        return HappinessSpec::from_expressions(parts, reference.schema);
    }
    throw UsageError("unknown criterion '" + name + "'; valid names: " + kCriterionNames);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Happiness-based fair post-processing of soft classifiers", "hfair"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(0, 1);
    app.set_config("--config", "", "Re-run from a manifest written by an earlier invocation");

    // generate
    SyntheticConfig gen_cfg;
    std::string gen_out;
    auto* gen = app.add_subcommand("generate", "Write the synthetic loan dataset");
    gen->add_option("--count", gen_cfg.count, "Number of rows")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_cfg.seed, "Random seed")->capture_default_str();
    exact_default(gen->add_option("--surcharge", gen_cfg.group1_surcharge, "Amount added to group 1 loan requests"),
                  gen_cfg.group1_surcharge);
    exact_default(gen->add_option("--group0-fraction", gen_cfg.group0_fraction, "Probability of group 0"),
                  gen_cfg.group0_fraction);
    gen->add_option("--out", gen_out, "Output CSV")->required();

    // train
    DataOptions train_data;
    ForestOptions train_forest_opts;
    std::uint64_t train_seed = 0;
    std::string train_out;
    auto* train = app.add_subcommand("train", "Fit the baseline random forest on the training split");
    train_data.add(train);
    train_forest_opts.add(train);
    train->add_option("--seed", train_seed, "Seed for the split and the forest")->capture_default_str();
    train->add_option("--out", train_out, "Output model JSON")->required();

    // predict
    DataOptions pred_data;
    std::string pred_model;
    std::string pred_out;
    auto* predict = app.add_subcommand("predict", "Score every row with a trained forest");
    pred_data.add(predict);
    predict->add_option("--model", pred_model, "Model JSON")->required();
    predict->add_option("--out", pred_out, "Output predictions CSV")->required();

    // evaluate
    DataOptions eval_data;
    PredictionOptions eval_pred;
    ForestOptions eval_forest;
    std::uint64_t eval_seed = 0;
    std::string eval_criterion = "equal-funding";
    std::string eval_out;
    auto* evaluate = app.add_subcommand("evaluate", "Accuracy and happiness gap of the unprocessed classifier");
    eval_data.add(evaluate);
    eval_pred.add(evaluate);
    eval_forest.add(evaluate);
    evaluate->add_option("--seed", eval_seed, "Seed for the split and the forest")->capture_default_str();
    evaluate->add_option("--criterion", eval_criterion, std::string("Happiness function: ") + kCriterionNames)
        ->capture_default_str();
    evaluate->add_option("--out", eval_out, "Output CSV (default: stdout)");

    // sweep
    DataOptions sweep_data;
    PredictionOptions sweep_pred;
    ForestOptions sweep_forest;
    std::uint64_t sweep_seed = 0;
    std::string criterion = "equal-funding";
    std::string measure;
    std::string mode = "alpha";
    std::string grid_text;
    std::size_t points = 50;
    std::string sweep_out;
    std::string dump_lp;
    auto* sweep_cmd = app.add_subcommand("sweep", "Trade-off curve of fitted post-processors");
    sweep_data.add(sweep_cmd);
    sweep_pred.add(sweep_cmd);
    sweep_forest.add(sweep_cmd);
    sweep_cmd->add_option("--seed", sweep_seed, "Seed for the split and the forest")->capture_default_str();
    sweep_cmd->add_option("--criterion", criterion, std::string("Happiness function to fit: ") + kCriterionNames)
        ->capture_default_str();
    sweep_cmd->add_option("--measure", measure, "Happiness function to report gaps with (default: --criterion)");
    sweep_cmd->add_option("--mode", mode, "eps: minimize loss at gap <= eps; alpha: minimize gap at accuracy >= alpha")
        ->capture_default_str()
        ->check(CLI::IsMember({"eps", "alpha"}));
    sweep_cmd->add_option("--grid", grid_text, "Comma-separated ascending constraint values (default: automatic)");
    sweep_cmd->add_option("--points", points, "Automatic grid size")->capture_default_str()->check(CLI::Range(2, 100000));
    sweep_cmd->add_option("--out", sweep_out, "Output prefix; writes <prefix>_validation.csv and <prefix>_test.csv")
        ->required();
    sweep_cmd->add_option("--dump-lp", dump_lp, "Write the LP of the first grid value in CPLEX LP format");

    // bound
    double gamma = 0.01, delta = 0.02, range_c = 1.0;
    std::size_t dim = 2, labels = 2;
    auto* bound = app.add_subcommand("bound", "Validation samples per group for delta-accurate moments");
    exact_default(bound->add_option("--gamma", gamma, "Failure probability, in (0, 1)"), gamma);
    exact_default(bound->add_option("--delta", delta, "Moment accuracy, > 0"), delta);
    exact_default(bound->add_option("--C", range_c, "Range of the happiness function, >= 1"), range_c);
    bound->add_option("--n", dim, "Happiness dimension")->capture_default_str();
    bound->add_option("--labels", labels, "Label space size")->capture_default_str();

    for (auto* sub : app.get_subcommands({})) sub->configurable();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    if (app.get_subcommands().empty()) {
        err << "usage error: a subcommand is required\n" << app.help();
        return 2;
    }

    try {
        if (*gen) return cmd_generate(app, gen_cfg, gen_out, out);

        if (*train) {
            const Dataset d = train_data.load();
            const auto parts = split_dataset(d, train_seed);
            const auto model = train_forest(parts.train, train_forest_opts.config(train_seed));
            write_file(train_out, save_model(model));
            write_manifest(app, "train", train_out + ".manifest.toml", {train_out});
            out << "trained " << model.trees.size() << " trees on " << parts.train.size() << " rows\n";
            return 0;
        }

        if (*predict) {
            Dataset d = pred_data.load();
            predict_dataset(load_model(read_file(pred_model)), d);
            std::ostringstream csv;
            write_predictions(csv, d);
            write_file(pred_out, csv.str());
            write_manifest(app, "predict", pred_out + ".manifest.toml", {pred_out});
            return 0;
        }

        if (*evaluate) {
            const auto s = prepare(eval_data.load(), eval_pred, eval_forest, eval_seed, out);
            const auto spec = happiness_by_name(eval_criterion, s.validation);
            const auto identity = PostProcessor::identity(s.validation.label_space.size());
            std::ostringstream csv;
            csv << "dataset_tag,accuracy";
            for (std::size_t i = 0; i < spec.dim(); ++i) csv << ",gap_" << i;
            csv << ",gap_inf\n";
            for (const auto* part : {&s.validation, &s.test}) {
                const auto m = estimate_moments(*part, spec);
                const auto gap = happiness_gap(identity, m);
                csv << (part == &s.validation ? "validation" : "test") << ','
                    << format_number(expected_accuracy(identity, m));
                for (double g : gap) csv << ',' << format_number(g);
                csv << ',' << format_number(inf_norm(gap)) << '\n';
            }
            if (eval_out.empty()) {
                out << csv.str();
            } else {
                write_file(eval_out, csv.str());
                write_manifest(app, "evaluate", eval_out + ".manifest.toml", {eval_out});
            }
            return 0;
        }

        if (*sweep_cmd) {
            const auto s = prepare(sweep_data.load(), sweep_pred, sweep_forest, sweep_seed, out);
            const auto fit_spec = happiness_by_name(criterion, s.validation);
            const auto measure_spec = happiness_by_name(measure.empty() ? criterion : measure, s.validation);
            const auto m_fit = estimate_moments(s.validation, fit_spec);
            const auto m_val = estimate_moments(s.validation, measure_spec);
            const auto m_test = estimate_moments(s.test, measure_spec);
            const SweepMode sweep_mode = mode == "eps" ? SweepMode::Epsilon : SweepMode::Alpha;
            std::vector<double> grid;
            if (!grid_text.empty()) {
                grid = parse_grid(grid_text);
            } else {
                grid = sweep_mode == SweepMode::Epsilon ? default_epsilon_grid(m_fit, points)
                                                        : default_alpha_grid(m_fit, points);
            }
            if (!dump_lp.empty()) {
                const auto fp = sweep_mode == SweepMode::Epsilon ? build_fair_lp(m_fit, grid.front())
                                                                 : build_gap_lp(m_fit, grid.front());
                write_file(dump_lp, to_lp_format(fp.program));
            }
            const auto result = sweep(m_fit, m_val, m_test, grid, sweep_mode);
            const std::string val_path = sweep_out + "_validation.csv";
            const std::string test_path = sweep_out + "_test.csv";
            std::ostringstream v, t;
            write_curve_csv(v, result.validation);
            write_curve_csv(t, result.test);
            write_file(val_path, v.str());
            write_file(test_path, t.str());
            write_manifest(app, "sweep", sweep_out + ".manifest.toml", {val_path, test_path});
            std::size_t infeasible = 0;
            for (const auto& p : result.validation.points) infeasible += p.status == PointStatus::Infeasible;
            out << "wrote " << grid.size() << " points (" << infeasible << " infeasible) to " << val_path << ", "
                << test_path << "\n";
            if (result.solver_failed()) {
                err << "error: LP solver failed on at least one grid point\n";
                return 1;
            }
            return 0;
        }

        if (*bound) {
            if (!(gamma > 0.0 && gamma < 1.0)) throw UsageError("--gamma must lie in (0, 1)");
            if (!(delta > 0.0)) throw UsageError("--delta must be > 0");
            if (!(range_c >= 1.0)) throw UsageError("--C must be >= 1");
            if (dim < 1) throw UsageError("--n must be >= 1");
            if (labels < 2) throw UsageError("--labels must be >= 2");
            out << sample_size_bound(gamma, delta, range_c, dim, labels) << "\n";
            return 0;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace hfair::cli
