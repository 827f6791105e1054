#include "hfair/forest.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include <json.hpp>

#include "hfair/error.hpp"
#include "hfair/rng.hpp"

namespace hfair {

SplitIndices split_indices(std::size_t n, std::uint64_t seed) {
    if (n < 10) throw ArgumentError("need at least 10 samples to split");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(derive_seed(seed, 0x5eed));
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
    const std::size_t n_train = n * 20 / 100;
    const std::size_t n_val = n * 16 / 100;
    SplitIndices s;
    s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                        order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
    return s;
}

DatasetSplit split_dataset(const Dataset& d, std::uint64_t seed) {
    const auto idx = split_indices(d.size(), seed);
    return {d.subset(idx.train), d.subset(idx.validation), d.subset(idx.test)};
}

void ForestConfig::validate() const {
    if (tree_count < 1) throw ArgumentError("tree_count must be >= 1");
    if (max_depth < 1) throw ArgumentError("max_depth must be >= 1");
    if (min_leaf < 1) throw ArgumentError("min_leaf must be >= 1");
}

FeatureEncoder::FeatureEncoder(const FeatureSchema& schema, bool include_group,
                               const std::vector<std::string>& excluded)
    : schema_width_(schema.size()), include_group_(include_group) {
    for (const auto& name : excluded) {
        if (!schema.find(name)) throw ArgumentError("cannot exclude unknown feature '" + name + "'");
    }
    for (std::size_t c = 0; c < schema.size(); ++c) {
        const auto& col = schema.column(c);
        if (std::find(excluded.begin(), excluded.end(), col.name) != excluded.end()) continue;
        if (col.kind == FeatureKind::Numeric) {
            sources_.push_back({c, false, 0});
            names_.push_back(col.name);
        } else {
            sources_.push_back({c, true, col.categories.size()});
            for (const auto& cat : col.categories) names_.push_back(col.name + "=" + cat);
        }
    }
    if (include_group_) names_.push_back("z");
}

void FeatureEncoder::encode(std::span<const double> x, int z, std::span<double> out) const {
    if (x.size() != schema_width_) throw ArgumentError("feature row does not match the model schema");
    std::size_t o = 0;
    for (const auto& s : sources_) {
        if (!s.categorical) {
            out[o++] = x[s.column];
        } else {
            for (std::size_t c = 0; c < s.categories; ++c) out[o + c] = 0.0;
            out[o + static_cast<std::size_t>(x[s.column])] = 1.0;
            o += s.categories;
        }
    }
    if (include_group_) out[o] = static_cast<double>(z);
}

std::vector<std::vector<std::size_t>> FeatureEncoder::groups() const {
    std::vector<std::vector<std::size_t>> g;
    std::size_t o = 0;
    for (const auto& s : sources_) {
        const std::size_t w = s.categorical ? s.categories : 1;
        std::vector<std::size_t> cols(w);
        std::iota(cols.begin(), cols.end(), o);
        g.push_back(std::move(cols));
        o += w;
    }
    if (include_group_) g.push_back({o});
    return g;
}

const std::vector<double>& DecisionTree::leaf_for(std::span<const double> encoded) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        const auto& n = nodes[i];
        i = encoded[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return leaves[nodes[i].leaf];
}

namespace {

class TreeBuilder {
public:
    TreeBuilder(const std::vector<double>& x, std::size_t width, const std::vector<std::vector<std::size_t>>& groups,
                const std::vector<Label>& y, std::size_t classes, const ForestConfig& cfg, std::size_t mtry,
                std::uint64_t seed)
        : x_(x), width_(width), groups_(groups), y_(y), classes_(classes), cfg_(cfg), mtry_(mtry), rng_(seed) {}

    DecisionTree build(std::vector<std::uint32_t> rows) {
        tree_ = {};
        grow(rows, 0);
        return std::move(tree_);
    }

private:
    std::vector<double> counts(const std::vector<std::uint32_t>& rows) const {
        std::vector<double> c(classes_, 0.0);
        for (auto r : rows) c[y_[r]] += 1.0;
        return c;
    }

    std::uint32_t make_leaf(const std::vector<double>& c, double total) {
        TreeNode node;
        node.leaf = static_cast<std::uint32_t>(tree_.leaves.size());
        std::vector<double> freq(c);
        for (double& v : freq) v /= total;
        tree_.leaves.push_back(std::move(freq));
        tree_.nodes.push_back(node);
        return static_cast<std::uint32_t>(tree_.nodes.size() - 1);
    }

    std::uint32_t grow(std::vector<std::uint32_t>& rows, std::size_t depth) {
        const auto c = counts(rows);
        const double total = static_cast<double>(rows.size());
        const bool pure = std::count_if(c.begin(), c.end(), [](double v) { return v > 0; }) <= 1;
        if (pure || depth >= cfg_.max_depth || rows.size() < 2 * cfg_.min_leaf) return make_leaf(c, total);

        // Sample mtry source columns without replacement.
        std::vector<std::size_t> picked(groups_.size());
        std::iota(picked.begin(), picked.end(), 0);
        std::vector<std::size_t> features;
        for (std::size_t i = 0; i < mtry_; ++i) {
            std::swap(picked[i], picked[i + rng_.index(picked.size() - i)]);
            const auto& g = groups_[picked[i]];
            features.insert(features.end(), g.begin(), g.end());
        }

        double parent_score = 0.0;
        for (double v : c) parent_score += v * v;
        parent_score /= total;

        double best_score = parent_score + 1e-12;
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<std::pair<double, Label>> column(rows.size());
        std::vector<double> left(classes_);
        for (const std::size_t feat : features) {
            for (std::size_t i = 0; i < rows.size(); ++i) column[i] = {x_[rows[i] * width_ + feat], y_[rows[i]]};
            std::sort(column.begin(), column.end());
            if (column.front().first == column.back().first) continue;
            std::fill(left.begin(), left.end(), 0.0);
            double left_sq = 0.0;
            double right_sq = 0.0;
            std::vector<double> right(c);
            for (double v : right) right_sq += v * v;
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                const Label l = column[i].second;
                left_sq += 2.0 * left[l] + 1.0;
                left[l] += 1.0;
                right_sq -= 2.0 * right[l] - 1.0;
                right[l] -= 1.0;
                const std::size_t n_left = i + 1;
                const std::size_t n_right = column.size() - n_left;
                if (column[i].first == column[i + 1].first) continue;
                if (n_left < cfg_.min_leaf || n_right < cfg_.min_leaf) continue;
                // Maximizing sum over children of (sum_k n_k^2) / n minimizes weighted Gini.
                const double score = left_sq / static_cast<double>(n_left) + right_sq / static_cast<double>(n_right);
                if (score > best_score) {
                    best_score = score;
                    best_feature = static_cast<int>(feat);
                    double mid = 0.5 * (column[i].first + column[i + 1].first);
                    if (!(mid < column[i + 1].first)) mid = column[i].first;
                    best_threshold = mid;
                }
            }
        }
        if (best_feature < 0) return make_leaf(c, total);

        std::vector<std::uint32_t> lo;
        std::vector<std::uint32_t> hi;
        for (auto r : rows) {
            (x_[r * width_ + static_cast<std::size_t>(best_feature)] <= best_threshold ? lo : hi).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        const auto id = static_cast<std::uint32_t>(tree_.nodes.size());
        tree_.nodes.push_back({best_feature, best_threshold, 0, 0, 0});
        const auto l = grow(lo, depth + 1);
        const auto h = grow(hi, depth + 1);
        tree_.nodes[id].left = l;
        tree_.nodes[id].right = h;
        return id;
    }

    const std::vector<double>& x_;
    std::size_t width_;
    const std::vector<std::vector<std::size_t>>& groups_;
    const std::vector<Label>& y_;
    std::size_t classes_;
    const ForestConfig& cfg_;
    std::size_t mtry_;
    CounterRng rng_;
    DecisionTree tree_;
};

// Row order independent of how the training rows happen to be arranged.
std::vector<std::size_t> canonical_order(const Dataset& d) {
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& sa = d.samples[a];
        const auto& sb = d.samples[b];
        if (sa.features != sb.features) return sa.features < sb.features;
        if (sa.y != sb.y) return sa.y < sb.y;
        return sa.z < sb.z;
    });
    return order;
}

} // namespace

ForestModel train_forest(const Dataset& train, const ForestConfig& cfg) {
    cfg.validate();
    if (train.samples.empty()) throw ArgumentError("training set is empty");
    ForestModel model;
    model.labels = train.label_space;
    model.schema = train.schema;
    model.config = cfg;
    model.encoder = FeatureEncoder(train.schema, cfg.include_group, cfg.excluded_features);
    const std::size_t k = train.label_space.size();

    std::vector<double> class_counts(k, 0.0);
    for (const auto& s : train.samples) class_counts[s.y] += 1.0;
    if (std::count_if(class_counts.begin(), class_counts.end(), [](double v) { return v > 0; }) == 1) {
        std::clog << "warning: training set has a single class; fitting a constant model\n";
        DecisionTree t;
        std::vector<double> freq(k, 0.0);
        for (std::size_t j = 0; j < k; ++j) freq[j] = class_counts[j] > 0 ? 1.0 : 0.0;
        t.leaves.push_back(std::move(freq));
        t.nodes.push_back(TreeNode{});
        model.trees.push_back(std::move(t));
        return model;
    }

    const std::size_t width = model.encoder.width();
    if (width == 0) throw ArgumentError("no features left to train on");
    const auto order = canonical_order(train);
    const std::size_t n = order.size();
    std::vector<double> x(n * width);
    std::vector<Label> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = train.samples[order[i]];
        model.encoder.encode(s.features, s.z, std::span<double>(x.data() + i * width, width));
        y[i] = s.y;
    }
    const auto groups = model.encoder.groups();
    std::size_t mtry = cfg.features_per_split;
    if (mtry == 0) mtry = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(groups.size()))));
    mtry = std::clamp<std::size_t>(mtry, 1, groups.size());

    for (std::size_t t = 0; t < cfg.tree_count; ++t) {
        const std::uint64_t tree_seed = derive_seed(cfg.seed, t);
        CounterRng boot(tree_seed);
        std::vector<std::uint32_t> rows(n);
        for (auto& r : rows) r = static_cast<std::uint32_t>(boot.index(n));
        TreeBuilder builder(x, width, groups, y, k, cfg, mtry, derive_seed(tree_seed, 1));
        model.trees.push_back(builder.build(std::move(rows)));
    }
    return model;
}

std::vector<double> predict_soft(const ForestModel& model, std::span<const double> x, int z) {
    if (x.size() != model.schema.size()) throw ArgumentError("feature row does not match the model schema");
    std::vector<double> encoded(model.encoder.width());
    model.encoder.encode(x, z, encoded);
    std::vector<double> p(model.labels.size(), 0.0);
    for (const auto& tree : model.trees) {
        const auto& leaf = tree.leaf_for(encoded);
        for (std::size_t j = 0; j < p.size(); ++j) p[j] += leaf[j];
    }
    const double n = static_cast<double>(model.trees.size());
    double sum = 0.0;
    for (double& v : p) {
        v /= n;
        sum += v;
    }
    for (double& v : p) v /= sum;
    return p;
}

void predict_dataset(const ForestModel& model, Dataset& d) {
    if (!(d.schema == model.schema) || !(d.label_space == model.labels)) {
        throw ArgumentError("dataset schema does not match the model");
    }
    for (auto& s : d.samples) s.p_hat = predict_soft(model, s.features, s.z);
}

std::string save_model(const ForestModel& model) {
    nlohmann::ordered_json j;
    j["format"] = "hfair-forest";
    j["version"] = 1;
    j["labels"] = model.labels.names();
    auto& features = j["features"] = nlohmann::ordered_json::array();
    for (const auto& c : model.schema.columns()) {
        nlohmann::ordered_json f;
        f["name"] = c.name;
        f["kind"] = c.kind == FeatureKind::Numeric ? "numeric" : "categorical";
        if (c.kind == FeatureKind::Categorical) f["categories"] = c.categories;
        features.push_back(f);
    }
    const auto& cfg = model.config;
    j["config"] = {{"tree_count", cfg.tree_count},   {"max_depth", cfg.max_depth},
                   {"min_leaf", cfg.min_leaf},       {"features_per_split", cfg.features_per_split},
                   {"seed", cfg.seed},               {"include_group", cfg.include_group},
                   {"excluded_features", cfg.excluded_features}};
    auto& trees = j["trees"] = nlohmann::ordered_json::array();
    for (const auto& t : model.trees) {
        nlohmann::ordered_json jt;
        auto& nodes = jt["nodes"] = nlohmann::ordered_json::array();
        for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.leaf});
        jt["leaves"] = t.leaves;
        trees.push_back(std::move(jt));
    }
    return j.dump() + "\n";
}

ForestModel load_model(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("format") != "hfair-forest") throw DataError("not an hfair forest model");
        if (j.at("version") != 1) throw DataError("unsupported model version");
        ForestModel model;
        model.labels = LabelSpace(j.at("labels").get<std::vector<std::string>>());
        std::vector<FeatureColumn> columns;
        for (const auto& f : j.at("features")) {
            FeatureColumn c;
            c.name = f.at("name").get<std::string>();
            c.kind = f.at("kind") == "numeric" ? FeatureKind::Numeric : FeatureKind::Categorical;
            if (c.kind == FeatureKind::Categorical) c.categories = f.at("categories").get<std::vector<std::string>>();
            columns.push_back(std::move(c));
        }
        model.schema = FeatureSchema(std::move(columns));
        const auto& jc = j.at("config");
        auto& cfg = model.config;
        cfg.tree_count = jc.at("tree_count");
        cfg.max_depth = jc.at("max_depth");
        cfg.min_leaf = jc.at("min_leaf");
        cfg.features_per_split = jc.at("features_per_split");
        cfg.seed = jc.at("seed");
        cfg.include_group = jc.at("include_group");
        cfg.excluded_features = jc.at("excluded_features").get<std::vector<std::string>>();
        model.encoder = FeatureEncoder(model.schema, cfg.include_group, cfg.excluded_features);
        for (const auto& jt : j.at("trees")) {
            DecisionTree t;
            for (const auto& n : jt.at("nodes")) {
                t.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<std::uint32_t>(),
                                   n.at(3).get<std::uint32_t>(), n.at(4).get<std::uint32_t>()});
            }
            t.leaves = jt.at("leaves").get<std::vector<std::vector<double>>>();
            // Children come after their parent, which also rules out cycles.
            for (std::size_t i = 0; i < t.nodes.size(); ++i) {
                const auto& n = t.nodes[i];
                const bool bad = n.feature >= 0
                                     ? (n.left >= t.nodes.size() || n.right >= t.nodes.size() || n.left <= i ||
                                        n.right <= i || static_cast<std::size_t>(n.feature) >= model.encoder.width())
                                     : n.leaf >= t.leaves.size();
                if (bad) throw DataError("model tree has out-of-range references");
            }
            model.trees.push_back(std::move(t));
        }
        if (model.trees.empty()) throw DataError("model has no trees");
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model: ") + e.what());
    }
}

} // namespace hfair
