#pragma once

#include "sacca/errors.hpp"
#include "sacca/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sacca {

// Per-column record of the raw -> current transform. Applied in order:
// optional clamp (winsorize), then the affine map v -> (v - shift) / scale.
// When winsorizeFirst is false the clamp happens after the affine map,
// in already-standardized units.
struct ColumnTransform {
    bool clamped = false;
    double lo = 0.0, hi = 0.0;
    double shift = 0.0;
    double scale = 1.0;
};

struct PreprocessState {
    std::vector<ColumnTransform> x, y;
    bool standardized = false;
    bool winsorized = false;
    bool winsorizeFirst = true;
};

struct PairedDataset {
    Matrix x;  // n x p1
    Matrix y;  // n x p2
    PreprocessState prep;

    int n() const { return static_cast<int>(x.rows()); }
    int p1() const { return static_cast<int>(x.cols()); }
    int p2() const { return static_cast<int>(y.cols()); }
};

struct SplitPlan {
    IndexList trainIdx, holdoutIdx;
    std::uint64_t seed = 0;
};

PairedDataset makeDataset(Matrix x, Matrix y);

// Column-wise mean 0, population sd 1 (divisor n). Throws ConstantColumn.
PairedDataset standardize(const PairedDataset& data);

// Clamp every entry to [mean - multiplier*MAD, mean + multiplier*MAD], where
// MAD is the mean absolute deviation about the column mean (or median when
// aboutMedian is set).
PairedDataset winsorize(const PairedDataset& data, double multiplier = 2.0,
                        bool aboutMedian = false);

SplitPlan splitHalf(int n, std::uint64_t seed);

// Re-applies the transforms recorded in prep to fresh raw data.
PairedDataset applyPreprocess(const PreprocessState& prep, const Matrix& x, const Matrix& y);

Matrix selectColumns(const Matrix& m, const IndexList& cols);
Matrix selectRows(const Matrix& m, const IndexList& rows);

// CSV with a header row; every remaining cell numeric; rejects NaN/Inf.
Matrix loadCsv(const std::string& path, std::vector<std::string>* header = nullptr);
PairedDataset loadCsvPair(const std::string& xPath, const std::string& yPath);

}  // namespace sacca
