#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hfair/core.hpp"

namespace hfair {

// Parses one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_line(const std::string& line);

struct DatasetLayout {
    FeatureSchema schema;
    LabelSpace labels;
};

// Reads a dataset with one column per schema feature plus mandatory `y` and
// `z` columns and optional `p_0..p_{K-1}` soft predictions. Other columns are
// ignored. Errors name the 1-based file line and the column.
Dataset load_csv(const std::filesystem::path& path, const DatasetLayout& layout);

// Guesses a layout: columns where every cell parses as a number are numeric,
// the rest categorical with sorted categories. Labels are the sorted distinct
// `y` values (numerically when all are numbers).
DatasetLayout infer_layout(const std::filesystem::path& path);

// Writes features, y and z (and p_* when every sample has a prediction).
void write_csv(std::ostream& out, const Dataset& d);

std::string layout_to_json(const DatasetLayout& layout);
DatasetLayout layout_from_json(const std::string& text);

// Row-aligned predictions file with header p_0..p_{K-1}.
std::vector<std::vector<double>> load_predictions(const std::filesystem::path& path, std::size_t label_count);
void write_predictions(std::ostream& out, const Dataset& d);

} // namespace hfair
