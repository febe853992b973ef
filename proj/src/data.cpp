#include "sacca/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace sacca {

namespace {

void checkFinite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw CsvError(std::string("non-finite entries in ") + what);
}

void standardizeView(Matrix& m, std::vector<ColumnTransform>& meta, int indexOffset) {
    const double n = static_cast<double>(m.rows());
    if (meta.size() != static_cast<size_t>(m.cols())) meta.resize(m.cols());
    for (int j = 0; j < m.cols(); ++j) {
        double mean = m.col(j).mean();
        double sd = std::sqrt((m.col(j).array() - mean).square().sum() / n);
        if (sd <= 1e-12) throw ConstantColumn(indexOffset + j);
        m.col(j) = (m.col(j).array() - mean) / sd;
        meta[j].shift += mean * meta[j].scale;
        meta[j].scale *= sd;
    }
}

void winsorizeView(Matrix& m, std::vector<ColumnTransform>& meta, double multiplier,
                   bool aboutMedian) {
    const int n = static_cast<int>(m.rows());
    if (meta.size() != static_cast<size_t>(m.cols())) meta.resize(m.cols());
    for (int j = 0; j < m.cols(); ++j) {
        double center;
        if (aboutMedian) {
            std::vector<double> v(m.col(j).data(), m.col(j).data() + n);
            std::nth_element(v.begin(), v.begin() + n / 2, v.end());
            center = v[n / 2];
            if (n % 2 == 0) {
                double lowerMid = *std::max_element(v.begin(), v.begin() + n / 2);
                center = 0.5 * (center + lowerMid);
            }
        } else {
            center = m.col(j).mean();
        }
        double mad = (m.col(j).array() - center).abs().mean();
        double lo = center - multiplier * mad;
        double hi = center + multiplier * mad;
        m.col(j) = m.col(j).array().max(lo).min(hi);
        meta[j].clamped = true;
        meta[j].lo = lo;
        meta[j].hi = hi;
    }
}

void applyView(const std::vector<ColumnTransform>& meta, Matrix& m, bool winsorizeFirst) {
    if (meta.size() != static_cast<size_t>(m.cols()))
        throw DimensionMismatch(static_cast<long>(meta.size()), m.cols());
    for (int j = 0; j < m.cols(); ++j) {
        const ColumnTransform& t = meta[j];
        if (winsorizeFirst && t.clamped) m.col(j) = m.col(j).array().max(t.lo).min(t.hi);
        m.col(j) = (m.col(j).array() - t.shift) / t.scale;
        if (!winsorizeFirst && t.clamped) m.col(j) = m.col(j).array().max(t.lo).min(t.hi);
    }
}

}  // namespace

PairedDataset makeDataset(Matrix x, Matrix y) {
    if (x.rows() != y.rows()) throw DimensionMismatch(x.rows(), y.rows());
    if (x.rows() < 4) throw TooFewSamples(static_cast<int>(x.rows()));
    checkFinite(x, "X");
    checkFinite(y, "Y");
    PairedDataset d;
    d.x = std::move(x);
    d.y = std::move(y);
    d.prep.x.resize(d.x.cols());
    d.prep.y.resize(d.y.cols());
    return d;
}

PairedDataset standardize(const PairedDataset& data) {
    PairedDataset out = data;
    standardizeView(out.x, out.prep.x, 0);
    standardizeView(out.y, out.prep.y, data.p1());
    out.prep.standardized = true;
    return out;
}

PairedDataset winsorize(const PairedDataset& data, double multiplier, bool aboutMedian) {
    PairedDataset out = data;
    winsorizeView(out.x, out.prep.x, multiplier, aboutMedian);
    winsorizeView(out.y, out.prep.y, multiplier, aboutMedian);
    out.prep.winsorized = true;
    out.prep.winsorizeFirst = !data.prep.standardized;
    return out;
}

SplitPlan splitHalf(int n, std::uint64_t seed) {
    if (n < 4) throw TooFewSamples(n);
    IndexList idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    SplitPlan plan;
    plan.seed = seed;
    const int nTrain = (n + 1) / 2;
    plan.trainIdx.assign(idx.begin(), idx.begin() + nTrain);
    plan.holdoutIdx.assign(idx.begin() + nTrain, idx.end());
    std::sort(plan.trainIdx.begin(), plan.trainIdx.end());
    std::sort(plan.holdoutIdx.begin(), plan.holdoutIdx.end());
    return plan;
}

PairedDataset applyPreprocess(const PreprocessState& prep, const Matrix& x, const Matrix& y) {
    PairedDataset out = makeDataset(x, y);
    applyView(prep.x, out.x, prep.winsorizeFirst);
    applyView(prep.y, out.y, prep.winsorizeFirst);
    out.prep = prep;
    return out;
}

Matrix selectColumns(const Matrix& m, const IndexList& cols) {
    Matrix out(m.rows(), static_cast<long>(cols.size()));
    for (size_t i = 0; i < cols.size(); ++i) out.col(static_cast<long>(i)) = m.col(cols[i]);
    return out;
}

Matrix selectRows(const Matrix& m, const IndexList& rows) {
    Matrix out(static_cast<long>(rows.size()), m.cols());
    for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<long>(i)) = m.row(rows[i]);
    return out;
}

Matrix loadCsv(const std::string& path, std::vector<std::string>* header) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw CsvError("empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> head;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) head.push_back(cell);
    }
    if (header) *header = head;
    const size_t p = head.size();
    std::vector<double> values;
    size_t rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        size_t count = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                size_t pos = 0;
                double v = std::stod(cell, &pos);
                values.push_back(v);
            } catch (const std::exception&) {
                throw CsvError("non-numeric cell '" + cell + "' in " + path);
            }
            ++count;
        }
        if (count != p)
            throw CsvError("row with " + std::to_string(count) + " cells, expected " +
                           std::to_string(p) + " in " + path);
        ++rows;
    }
    Matrix m(static_cast<long>(rows), static_cast<long>(p));
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < p; ++j) m(static_cast<long>(i), static_cast<long>(j)) = values[i * p + j];
    checkFinite(m, path.c_str());
    return m;
}

PairedDataset loadCsvPair(const std::string& xPath, const std::string& yPath) {
    Matrix x = loadCsv(xPath);
    Matrix y = loadCsv(yPath);
    if (x.rows() != y.rows())
        throw CsvError("row count mismatch: " + xPath + " has " + std::to_string(x.rows()) +
                       ", " + yPath + " has " + std::to_string(y.rows()));
    return makeDataset(std::move(x), std::move(y));
}

}  // namespace sacca
