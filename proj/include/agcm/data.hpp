#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "agcm/estimation.hpp"

namespace agcm {

struct CsvOptions {
    std::string group_column = "group";
};

// Wide-format repeated measures: one row per subject, one column per
// timepoint (numeric header), plus a group label column.
struct LongitudinalDataset {
    Matrix Y;                               // n x p, groups contiguous
    Vector timepoints;                      // strictly increasing
    std::vector<std::string> group_labels;  // first-appearance order
    std::vector<int> group_sizes;           // aligned with group_labels
    std::vector<Index> source_row;          // internal row -> 0-based data row in the source

    Index n() const { return Y.rows(); }
    Index p() const { return Y.cols(); }
    int group_count() const { return static_cast<int>(group_labels.size()); }
};

// Rows are regrouped so each group's subjects are contiguous (stable within
// the group); source_row records where each internal row came from.
LongitudinalDataset parse_csv(std::istream& in, const CsvOptions& opts = {});
LongitudinalDataset load_csv(const std::filesystem::path& path, const CsvOptions& opts = {});

// The Potthoff-Roy dental measurements: 11 girls and 16 boys, one distance
// measurement at ages 8, 10, 12 and 14.
LongitudinalDataset dental_dataset();

// The embedded dataset as CSV text, byte-identical to the shipped asset.
const std::string& dental_csv();

// The dataset in the same wide CSV schema parse_csv reads, with values at
// full precision; parse_csv(to_csv(d)) reproduces d exactly.
std::string to_csv(const LongitudinalDataset& data);

// Indicator-design additive model for the dataset: block i is group i's
// indicator column with a polynomial profile of degrees[i].
ModelSpec dataset_spec(const LongitudinalDataset& data, const std::vector<int>& degrees,
                       double tol = kOrthogonalityTol);

struct SelectionCell {
    std::vector<int> degrees;
    double aic = 0.0;
    double rmss = 0.0;
    Index n_params = 0;
    bool valid = false;
    std::string error;  // why the cell was excluded, empty when valid
};

struct SelectionResult {
    std::vector<SelectionCell> grid;  // full cross product, lexicographic in degrees
    std::vector<int> best;            // empty when nothing fitted
    std::vector<std::vector<int>> ties;
};

// Fits every degree tuple in {1..max_degrees[0]} x ... x {1..max_degrees[k-1]}
// and picks the minimal AIC; ties go to fewer parameters, then lexicographic
// order. Cells whose fit fails are kept in the grid, marked invalid.
SelectionResult select_degrees(const LongitudinalDataset& data,
                               const std::vector<int>& max_degrees,
                               double tol = kOrthogonalityTol);

}  // namespace agcm
