#include "agcm/data.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <utility>

namespace agcm {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(trim(current));
    return fields;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* begin = text.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + text.size() && std::isfinite(out);
}

}  // namespace

LongitudinalDataset parse_csv(std::istream& in, const CsvOptions& opts) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw ValidationError("empty CSV: no header row");

    const std::vector<std::string> header = split_fields(lines.front());
    long group_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == opts.group_column) {
            group_col = static_cast<long>(c);
            break;
        }
    if (group_col < 0)
        throw ValidationError("group column \"" + opts.group_column + "\" not found in header");
    if (header.size() < 2) throw ValidationError("no timepoint columns in header");

    std::vector<double> times;
    std::vector<std::size_t> value_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (static_cast<long>(c) == group_col) continue;
        double t = 0.0;
        if (!parse_double(header[c], t))
            throw ValidationError("header cell \"" + header[c] +
                                  "\" is not a numeric timepoint");
        times.push_back(t);
        value_cols.push_back(c);
    }
    for (std::size_t j = 1; j < times.size(); ++j)
        if (!(times[j] > times[j - 1])) throw UnsortedTimepoints();

    const std::size_t p = times.size();
    struct Row {
        std::size_t group;
        Index source;
        Vector values;
    };
    std::vector<Row> rows;
    std::vector<std::string> labels;
    std::map<std::string, std::size_t> label_index;

    for (std::size_t l = 1; l < lines.size(); ++l) {
        const long data_row = static_cast<long>(l);  // 1-based among data rows
        const std::vector<std::string> fields = split_fields(lines[l]);
        if (fields.size() < header.size())
            throw MissingValue(data_row, static_cast<long>(fields.size()) + 1);
        if (fields.size() > header.size())
            throw ValidationError("data row " + std::to_string(data_row) + " has " +
                                  std::to_string(fields.size()) + " fields, header has " +
                                  std::to_string(header.size()));
        const std::string& label = fields[static_cast<std::size_t>(group_col)];
        if (label.empty()) throw MissingValue(data_row, group_col + 1);

        Vector values(static_cast<Index>(p));
        for (std::size_t j = 0; j < p; ++j) {
            const std::string& cell = fields[value_cols[j]];
            const long file_col = static_cast<long>(value_cols[j]) + 1;
            if (cell.empty()) throw MissingValue(data_row, file_col);
            double v = 0.0;
            if (!parse_double(cell, v)) throw NonNumeric(data_row, file_col, cell);
            values(static_cast<Index>(j)) = v;
        }

        auto [it, inserted] = label_index.try_emplace(label, labels.size());
        if (inserted) labels.push_back(label);
        rows.push_back(Row{it->second, static_cast<Index>(l - 1), std::move(values)});
    }
    if (rows.empty()) throw EmptyDesign();

    LongitudinalDataset data;
    data.timepoints = Eigen::Map<const Vector>(times.data(), static_cast<Index>(p));
    data.group_labels = labels;
    data.group_sizes.assign(labels.size(), 0);
    data.Y = Matrix(static_cast<Index>(rows.size()), static_cast<Index>(p));
    data.source_row.reserve(rows.size());

    Index at = 0;
    for (std::size_t g = 0; g < labels.size(); ++g) {
        for (const Row& row : rows) {
            if (row.group != g) continue;
            data.Y.row(at) = row.values.transpose();
            data.source_row.push_back(row.source);
            ++data.group_sizes[g];
            ++at;
        }
    }
    return data;
}

LongitudinalDataset load_csv(const std::filesystem::path& path, const CsvOptions& opts) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open \"" + path.string() + "\" for reading");
    return parse_csv(in, opts);
}

const std::string& dental_csv() {
    static const std::string csv =
        "group,8,10,12,14\n"
        "girl,21,20,21.5,23\n"
        "girl,21,21.5,24,25.5\n"
        "girl,20.5,24,24.5,26\n"
        "girl,23.5,24.5,25,26.5\n"
        "girl,21.5,23,22.5,23.5\n"
        "girl,20,21,21,22.5\n"
        "girl,21.5,22.5,23,25\n"
        "girl,23,23,23.5,24\n"
        "girl,20,21,22,21.5\n"
        "girl,16.5,19,19,19.5\n"
        "girl,24.5,25,28,28\n"
        "boy,26,25,29,31\n"
        "boy,21.5,22.5,23,26.5\n"
        "boy,23,22.5,24,27.5\n"
        "boy,25.5,27.5,26.5,27\n"
        "boy,20,23.5,22.5,26\n"
        "boy,24.5,25.5,27,28.5\n"
        "boy,22,22,24.5,26.5\n"
        "boy,24,21.5,24.5,25.5\n"
        "boy,23,20.5,31,26\n"
        "boy,27.5,28,31,31.5\n"
        "boy,23,23,23.5,25\n"
        "boy,21.5,23.5,24,28\n"
        "boy,17,24.5,26,29.5\n"
        "boy,22.5,25.5,25.5,26\n"
        "boy,23,24.5,26,30\n"
        "boy,22,21.5,23.5,25\n";
    return csv;
}

LongitudinalDataset dental_dataset() {
    std::istringstream in(dental_csv());
    return parse_csv(in);
}

std::string to_csv(const LongitudinalDataset& data) {
    auto g17 = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    std::ostringstream out;
    out << "group";
    for (Index j = 0; j < data.p(); ++j) out << "," << g17(data.timepoints(j));
    out << "\n";
    Index row = 0;
    for (std::size_t g = 0; g < data.group_labels.size(); ++g) {
        for (int l = 0; l < data.group_sizes[g]; ++l, ++row) {
            out << data.group_labels[g];
            for (Index j = 0; j < data.p(); ++j) out << "," << g17(data.Y(row, j));
            out << "\n";
        }
    }
    return out.str();
}

ModelSpec dataset_spec(const LongitudinalDataset& data, const std::vector<int>& degrees,
                       double tol) {
    if (static_cast<int>(degrees.size()) != data.group_count())
        throw ValidationError("got " + std::to_string(degrees.size()) + " degrees for " +
                              std::to_string(data.group_count()) + " groups");
    std::vector<Matrix> indicators = build_group_indicator(data.group_sizes);
    std::vector<DesignBlock> blocks;
    blocks.reserve(indicators.size());
    for (std::size_t g = 0; g < indicators.size(); ++g) {
        blocks.push_back(DesignBlock{std::move(indicators[g]),
                                     build_polynomial_profile(data.timepoints, degrees[g]),
                                     data.group_labels[g]});
    }
    return validate(std::move(blocks), tol);
}

namespace {

// Total order for the argmin: AIC, then parameter count, then lexicographic
// degrees, so the winner cannot depend on enumeration order.
bool better_cell(const SelectionCell& a, const SelectionCell& b) {
    if (a.aic != b.aic) return a.aic < b.aic;
    if (a.n_params != b.n_params) return a.n_params < b.n_params;
    return a.degrees < b.degrees;
}

}  // namespace

SelectionResult select_degrees(const LongitudinalDataset& data,
                               const std::vector<int>& max_degrees, double tol) {
    if (static_cast<int>(max_degrees.size()) != data.group_count())
        throw ValidationError("got " + std::to_string(max_degrees.size()) +
                              " degree bounds for " + std::to_string(data.group_count()) +
                              " groups");
    for (int d : max_degrees)
        if (d < 1) throw ValidationError("maximum degrees must be at least 1");

    SelectionResult result;
    std::vector<int> degrees(max_degrees.size(), 1);
    while (true) {
        SelectionCell cell;
        cell.degrees = degrees;
        try {
            const ModelSpec spec = dataset_spec(data, degrees, tol);
            const FitResult fr = fit(data.Y, spec);
            cell.aic = fr.aic;
            cell.rmss = fr.rmss;
            cell.n_params = fr.n_params;
            cell.valid = true;
        } catch (const Error& e) {
            cell.error = e.what();
        }
        result.grid.push_back(std::move(cell));

        // lexicographic odometer over {1..max_i}
        bool advanced = false;
        for (std::size_t pos = degrees.size(); pos-- > 0;) {
            if (degrees[pos] < max_degrees[pos]) {
                ++degrees[pos];
                std::fill(degrees.begin() + static_cast<long>(pos) + 1, degrees.end(), 1);
                advanced = true;
                break;
            }
        }
        if (!advanced) break;
    }

    const SelectionCell* best = nullptr;
    for (const SelectionCell& cell : result.grid) {
        if (!cell.valid) continue;
        if (best == nullptr || better_cell(cell, *best)) best = &cell;
    }
    if (best != nullptr) {
        result.best = best->degrees;
        for (const SelectionCell& cell : result.grid)
            if (cell.valid && cell.aic == best->aic && cell.degrees != best->degrees)
                result.ties.push_back(cell.degrees);
    }
    return result;
}

}  // namespace agcm
