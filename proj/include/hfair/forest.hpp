#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hfair/core.hpp"

namespace hfair {

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

// Seeded shuffle, then floor(0.20 N) train rows, floor(0.16 N) validation
// rows and the remainder as test. Throws ArgumentError for N < 10.
SplitIndices split_indices(std::size_t n, std::uint64_t seed);

struct DatasetSplit {
    Dataset train;
    Dataset validation;
    Dataset test;
};

DatasetSplit split_dataset(const Dataset& d, std::uint64_t seed);

struct ForestConfig {
    std::size_t tree_count = 100;
    std::size_t max_depth = 8;
    std::size_t min_leaf = 5;
    std::size_t features_per_split = 0; // source columns per split; 0: floor(sqrt(column count))
    std::uint64_t seed = 0;
    bool include_group = true;               // append z as a feature
    std::vector<std::string> excluded_features;

    void validate() const;
};

// One-hot encoding of a feature row: numeric columns pass through, each
// categorical column expands to one 0/1 column per category.
class FeatureEncoder {
public:
    FeatureEncoder() = default;
    FeatureEncoder(const FeatureSchema& schema, bool include_group, const std::vector<std::string>& excluded);

    std::size_t width() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    // Encoded column indices per source column (a categorical column owns all
    // its indicators); z is its own group when included.
    std::vector<std::vector<std::size_t>> groups() const;
    void encode(std::span<const double> x, int z, std::span<double> out) const;

private:
    struct Source {
        std::size_t column;
        bool categorical;
        std::size_t categories;
    };
    std::size_t schema_width_ = 0;
    std::vector<Source> sources_;
    bool include_group_ = false;
    std::vector<std::string> names_;
};

struct TreeNode {
    int feature = -1; // -1: leaf
    double threshold = 0.0; // encoded value <= threshold goes left
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t leaf = 0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    std::vector<std::vector<double>> leaves; // class frequencies, each sums to 1

    const std::vector<double>& leaf_for(std::span<const double> encoded) const;
};

struct ForestModel {
    LabelSpace labels;
    FeatureSchema schema;
    ForestConfig config;
    FeatureEncoder encoder;
    std::vector<DecisionTree> trees;
};

// CART trees with Gini impurity, bootstrap resampling and per-split feature
// subsampling. A single-class training set yields a constant model.
ForestModel train_forest(const Dataset& train, const ForestConfig& cfg);

// Mean of the per-tree leaf frequency vectors.
std::vector<double> predict_soft(const ForestModel& model, std::span<const double> x, int z);

// Fills p_hat for every sample.
void predict_dataset(const ForestModel& model, Dataset& d);

// JSON, format "hfair-forest" version 1.
std::string save_model(const ForestModel& model);
ForestModel load_model(const std::string& text);

} // namespace hfair
