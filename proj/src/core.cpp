#include "hfair/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hfair/error.hpp"

namespace hfair {

LabelSpace::LabelSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) {
        throw ArgumentError("label space needs at least two labels");
    }
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) {
        throw ArgumentError("label space contains duplicate labels");
    }
}

LabelSpace LabelSpace::numbered(std::size_t count) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < count; ++i) names.push_back(std::to_string(i));
    return LabelSpace(std::move(names));
}

std::optional<Label> LabelSpace::find(std::string_view name) const {
    auto it = std::find(labels_.begin(), labels_.end(), name);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<Label>(it - labels_.begin());
}

FeatureSchema::FeatureSchema(std::vector<FeatureColumn> columns) : columns_(std::move(columns)) {
    std::set<std::string> seen;
    for (const auto& c : columns_) {
        if (c.name.empty()) throw ArgumentError("feature with empty name");
        if (!seen.insert(c.name).second) throw ArgumentError("duplicate feature '" + c.name + "'");
        if (c.kind == FeatureKind::Categorical && c.categories.empty()) {
            throw ArgumentError("categorical feature '" + c.name + "' has no categories");
        }
    }
}

std::optional<std::size_t> FeatureSchema::find(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    return std::nullopt;
}

std::size_t FeatureSchema::require(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw EvalError("missing feature '" + std::string(name) + "'");
}

std::optional<std::size_t> FeatureSchema::category_code(std::size_t column,
                                                        std::string_view category) const {
    const auto& cats = columns_.at(column).categories;
    auto it = std::find(cats.begin(), cats.end(), category);
    if (it == cats.end()) return std::nullopt;
    return static_cast<std::size_t>(it - cats.begin());
}

bool is_distribution(std::span<const double> p, double tol) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

bool Dataset::has_predictions() const {
    return !samples.empty() && std::all_of(samples.begin(), samples.end(), [](const Sample& s) {
        return !s.p_hat.empty();
    });
}

std::array<std::size_t, kGroupCount> Dataset::group_counts() const {
    std::array<std::size_t, kGroupCount> counts{};
    for (const auto& s : samples) counts.at(static_cast<std::size_t>(s.z))++;
    return counts;
}

void Dataset::validate() const {
    for (std::size_t r = 0; r < samples.size(); ++r) {
        const Sample& s = samples[r];
        const std::string where = "sample " + std::to_string(r) + ": ";
        if (s.features.size() != schema.size()) throw DataError(where + "feature count mismatch");
        for (std::size_t c = 0; c < schema.size(); ++c) {
            const auto& col = schema.column(c);
            const double v = s.features[c];
            if (!std::isfinite(v)) throw DataError(where + "non-finite value in '" + col.name + "'");
            if (col.kind == FeatureKind::Categorical) {
                if (v < 0 || v != std::floor(v) || v >= static_cast<double>(col.categories.size())) {
                    throw DataError(where + "bad category code in '" + col.name + "'");
                }
            }
        }
        if (s.y >= label_space.size()) throw DataError(where + "label out of range");
        if (s.z != 0 && s.z != 1) throw DataError(where + "group must be 0 or 1");
        if (!s.p_hat.empty()) {
            if (s.p_hat.size() != label_space.size()) throw DataError(where + "prediction has wrong length");
            if (!is_distribution(s.p_hat)) throw DataError(where + "prediction is not a distribution");
        }
    }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out{label_space, schema, {}};
    out.samples.reserve(rows.size());
    for (std::size_t r : rows) out.samples.push_back(samples.at(r));
    return out;
}

double FeatureRow::numeric(std::string_view name) const {
    const std::size_t i = schema_->require(name);
    if (i >= values_.size()) throw EvalError("missing feature '" + std::string(name) + "'");
    return values_[i];
}

const std::string& FeatureRow::category(std::string_view name) const {
    const std::size_t i = schema_->require(name);
    const auto& col = schema_->column(i);
    if (col.kind != FeatureKind::Categorical) {
        throw EvalError("feature '" + std::string(name) + "' is not categorical");
    }
    if (i >= values_.size()) throw EvalError("missing feature '" + std::string(name) + "'");
    return col.categories.at(static_cast<std::size_t>(values_[i]));
}

} // namespace hfair
