#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hfair {

// Index into a LabelSpace.
using Label = std::size_t;

inline constexpr std::size_t kGroupCount = 2;

// Ordered, finite set of label identifiers. Index order is fixed at construction.
class LabelSpace {
public:
    LabelSpace() = default;
    explicit LabelSpace(std::vector<std::string> labels);

    // Labels "0", "1", ..., "count-1".
    static LabelSpace numbered(std::size_t count);

    std::size_t size() const { return labels_.size(); }
    const std::string& name(Label l) const { return labels_.at(l); }
    const std::vector<std::string>& names() const { return labels_; }
    std::optional<Label> find(std::string_view name) const;

    bool operator==(const LabelSpace&) const = default;

private:
    std::vector<std::string> labels_;
};

enum class FeatureKind { Numeric, Categorical };

struct FeatureColumn {
    std::string name;
    FeatureKind kind = FeatureKind::Numeric;
    std::vector<std::string> categories; // categorical only; code = position

    bool operator==(const FeatureColumn&) const = default;
};

// Column layout of a feature row. Categorical values are stored as their
// category code (a small non-negative integer held in a double).
class FeatureSchema {
public:
    FeatureSchema() = default;
    explicit FeatureSchema(std::vector<FeatureColumn> columns);

    std::size_t size() const { return columns_.size(); }
    const FeatureColumn& column(std::size_t i) const { return columns_.at(i); }
    const std::vector<FeatureColumn>& columns() const { return columns_; }

    std::optional<std::size_t> find(std::string_view name) const;
    // Throws EvalError naming the feature when absent.
    std::size_t require(std::string_view name) const;
    std::optional<std::size_t> category_code(std::size_t column, std::string_view category) const;

    bool operator==(const FeatureSchema&) const = default;

private:
    std::vector<FeatureColumn> columns_;
};

struct Sample {
    std::vector<double> features; // aligned with FeatureSchema
    Label y = 0;
    int z = 0;
    std::vector<double> p_hat; // soft prediction over the label space; empty until predicted
};

// Checks entries are >= 0 and sum to 1 within tol.
bool is_distribution(std::span<const double> p, double tol = 1e-9);

struct Dataset {
    LabelSpace label_space;
    FeatureSchema schema;
    std::vector<Sample> samples;

    std::size_t size() const { return samples.size(); }
    bool has_predictions() const;
    std::array<std::size_t, kGroupCount> group_counts() const;

    // Throws DataError on the first sample that violates the schema or label space.
    void validate() const;

    Dataset subset(std::span<const std::size_t> rows) const;
};

// Read-only view of one feature row, for lookups by name.
class FeatureRow {
public:
    FeatureRow(const FeatureSchema& schema, std::span<const double> values)
        : schema_(&schema), values_(values) {}

    double numeric(std::string_view name) const;
    const std::string& category(std::string_view name) const;

private:
    const FeatureSchema* schema_;
    std::span<const double> values_;
};

} // namespace hfair
