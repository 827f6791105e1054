#include "hfair/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include <json.hpp>

#include "hfair/error.hpp"
#include "hfair/postprocess.hpp"

namespace hfair {

namespace {

std::optional<double> parse_number(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
}

bool read_record(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

std::string field_error(std::size_t line, const std::string& column, const std::string& msg) {
    return "line " + std::to_string(line) + ", column '" + column + "': " + msg;
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> sorted_labels(const std::set<std::string>& values) {
    std::vector<std::string> out(values.begin(), values.end());
    const bool numeric = std::all_of(out.begin(), out.end(), [](const std::string& s) { return parse_number(s).has_value(); });
    if (numeric) {
        std::stable_sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
            return *parse_number(a) < *parse_number(b);
        });
    }
    return out;
}

} // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw DataError("unterminated quote in CSV record");
    out.push_back(std::move(cur));
    return out;
}

Dataset load_csv(const std::filesystem::path& path, const DatasetLayout& layout) {
    auto in = open(path);
    std::string line;
    if (!read_record(in, line)) throw DataError("'" + path.string() + "' is empty");
    const auto header = split_csv_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col.emplace(header[i], i);

    auto need = [&](const std::string& name) {
        auto it = col.find(name);
        if (it == col.end()) throw DataError("'" + path.string() + "': missing column '" + name + "'");
        return it->second;
    };
    const auto& schema = layout.schema;
    const std::size_t k = layout.labels.size();
    std::vector<std::size_t> feature_cols;
    for (const auto& c : schema.columns()) feature_cols.push_back(need(c.name));
    const std::size_t y_col = need("y");
    const std::size_t z_col = need("z");
    std::vector<std::size_t> p_cols;
    if (col.count("p_0")) {
        for (std::size_t j = 0; j < k; ++j) p_cols.push_back(need("p_" + std::to_string(j)));
    }

    Dataset d{layout.labels, schema, {}};
    std::size_t lineno = 1;
    while (read_record(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(cells.size()));
        }
        Sample s;
        for (std::size_t f = 0; f < schema.size(); ++f) {
            const auto& c = schema.column(f);
            const auto& cell = cells[feature_cols[f]];
            if (c.kind == FeatureKind::Numeric) {
                const auto v = parse_number(cell);
                if (!v) throw DataError(field_error(lineno, c.name, "not a number: '" + cell + "'"));
                s.features.push_back(*v);
            } else {
                const auto code = schema.category_code(f, cell);
                if (!code) throw DataError(field_error(lineno, c.name, "unknown category '" + cell + "'"));
                s.features.push_back(static_cast<double>(*code));
            }
        }
        const auto y = layout.labels.find(cells[y_col]);
        if (!y) throw DataError(field_error(lineno, "y", "unknown label '" + cells[y_col] + "'"));
        s.y = *y;
        const auto z = parse_number(cells[z_col]);
        if (!z || (*z != 0.0 && *z != 1.0)) {
            throw DataError(field_error(lineno, "z", "group must be 0 or 1, got '" + cells[z_col] + "'"));
        }
        s.z = static_cast<int>(*z);
        for (std::size_t j = 0; j < p_cols.size(); ++j) {
            const auto v = parse_number(cells[p_cols[j]]);
            if (!v || *v < 0.0) {
                throw DataError(field_error(lineno, header[p_cols[j]], "bad probability '" + cells[p_cols[j]] + "'"));
            }
            s.p_hat.push_back(*v);
        }
        if (!s.p_hat.empty() && !is_distribution(s.p_hat, 1e-6)) {
            throw DataError("line " + std::to_string(lineno) + ": probability columns do not sum to 1");
        }
        d.samples.push_back(std::move(s));
    }
    return d;
}

DatasetLayout infer_layout(const std::filesystem::path& path) {
    auto in = open(path);
    std::string line;
    if (!read_record(in, line)) throw DataError("'" + path.string() + "' is empty");
    const auto header = split_csv_line(line);
    std::vector<std::set<std::string>> values(header.size());
    std::vector<bool> numeric(header.size(), true);
    std::size_t lineno = 1;
    while (read_record(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) throw DataError("line " + std::to_string(lineno) + ": wrong field count");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (numeric[i] && !parse_number(cells[i])) numeric[i] = false;
            if (!numeric[i] || header[i] == "y") values[i].insert(cells[i]);
        }
    }
    std::vector<FeatureColumn> columns;
    std::optional<LabelSpace> labels;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto& name = header[i];
        if (name == "y") {
            labels = LabelSpace(sorted_labels(values[i]));
            continue;
        }
        if (name == "z" || (name.rfind("p_", 0) == 0 && parse_number(name.substr(2)))) continue;
        if (numeric[i]) {
            columns.push_back({name, FeatureKind::Numeric, {}});
        } else {
            columns.push_back({name, FeatureKind::Categorical, {values[i].begin(), values[i].end()}});
        }
    }
    if (!labels) throw DataError("'" + path.string() + "': missing column 'y'");
    return {FeatureSchema(std::move(columns)), std::move(*labels)};
}

void write_csv(std::ostream& out, const Dataset& d) {
    const auto& schema = d.schema;
    for (const auto& c : schema.columns()) out << quote(c.name) << ',';
    out << "y,z";
    const bool preds = d.has_predictions();
    if (preds) {
        for (std::size_t j = 0; j < d.label_space.size(); ++j) out << ",p_" << j;
    }
    out << '\n';
    for (const auto& s : d.samples) {
        for (std::size_t f = 0; f < schema.size(); ++f) {
            const auto& c = schema.column(f);
            if (c.kind == FeatureKind::Numeric) {
                out << format_number(s.features[f]);
            } else {
                out << quote(c.categories.at(static_cast<std::size_t>(s.features[f])));
            }
            out << ',';
        }
        out << quote(d.label_space.name(s.y)) << ',' << s.z;
        if (preds) {
            for (double p : s.p_hat) out << ',' << format_number(p);
        }
        out << '\n';
    }
}

std::string layout_to_json(const DatasetLayout& layout) {
    nlohmann::ordered_json j;
    j["labels"] = layout.labels.names();
    j["features"] = nlohmann::ordered_json::array();
    for (const auto& c : layout.schema.columns()) {
        nlohmann::ordered_json f;
        f["name"] = c.name;
        f["kind"] = c.kind == FeatureKind::Numeric ? "numeric" : "categorical";
        if (c.kind == FeatureKind::Categorical) f["categories"] = c.categories;
        j["features"].push_back(f);
    }
    return j.dump(2) + "\n";
}

DatasetLayout layout_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        std::vector<FeatureColumn> columns;
        for (const auto& f : j.at("features")) {
            FeatureColumn c;
            c.name = f.at("name").get<std::string>();
            const auto kind = f.at("kind").get<std::string>();
            if (kind == "numeric") {
                c.kind = FeatureKind::Numeric;
            } else if (kind == "categorical") {
                c.kind = FeatureKind::Categorical;
                c.categories = f.at("categories").get<std::vector<std::string>>();
            } else {
                throw DataError("feature '" + c.name + "' has unknown kind '" + kind + "'");
            }
            columns.push_back(std::move(c));
        }
        return {FeatureSchema(std::move(columns)), LabelSpace(j.at("labels").get<std::vector<std::string>>())};
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed schema: ") + e.what());
    }
}

std::vector<std::vector<double>> load_predictions(const std::filesystem::path& path, std::size_t label_count) {
    auto in = open(path);
    std::string line;
    if (!read_record(in, line)) throw DataError("'" + path.string() + "' is empty");
    const auto header = split_csv_line(line);
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < label_count; ++j) {
        auto it = std::find(header.begin(), header.end(), "p_" + std::to_string(j));
        if (it == header.end()) throw DataError("'" + path.string() + "': missing column 'p_" + std::to_string(j) + "'");
        cols.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    std::vector<std::vector<double>> out;
    std::size_t lineno = 1;
    while (read_record(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) throw DataError("line " + std::to_string(lineno) + ": wrong field count");
        std::vector<double> p;
        for (std::size_t c : cols) {
            const auto v = parse_number(cells[c]);
            if (!v || *v < 0.0) throw DataError(field_error(lineno, header[c], "bad probability '" + cells[c] + "'"));
            p.push_back(*v);
        }
        if (!is_distribution(p, 1e-6)) {
            throw DataError("line " + std::to_string(lineno) + ": probability columns do not sum to 1");
        }
        out.push_back(std::move(p));
    }
    return out;
}

void write_predictions(std::ostream& out, const Dataset& d) {
    for (std::size_t j = 0; j < d.label_space.size(); ++j) out << (j ? "," : "") << "p_" << j;
    out << '\n';
    for (const auto& s : d.samples) {
        for (std::size_t j = 0; j < s.p_hat.size(); ++j) out << (j ? "," : "") << format_number(s.p_hat[j]);
        out << '\n';
    }
}

} // namespace hfair
