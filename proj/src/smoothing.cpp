#include "sacca/smoothing.hpp"

#include "sacca/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace sacca {

namespace {

// Fills row `out` with local-linear weights at evaluation point x0.
// Returns false when the weighted design is numerically singular there.
bool localLinearRow(const Vector& column, double x0, double h, Eigen::RowVectorXd& out) {
    const int n = static_cast<int>(column.size());
    const double inv = 1.0 / (2.0 * h * h);
    Eigen::ArrayXd dx = column.array() - x0;
    Eigen::ArrayXd w = (-dx.square() * inv).exp();

    int distinctHeavy = 0;
    double firstHeavy = 0;
    for (int l = 0; l < n; ++l) {
        if (w[l] > 1e-12) {
            if (distinctHeavy == 0) {
                firstHeavy = column[l];
                distinctHeavy = 1;
            } else if (std::abs(column[l] - firstHeavy) > 1e-14) {
                distinctHeavy = 2;
                break;
            }
        }
    }
    if (distinctHeavy < 2) return false;

    const double sw = w.sum();
    const double sx = (w * dx).sum();
    const double sxx = (w * dx.square()).sum();
    const double denom = sw * sxx - sx * sx;
    if (!(denom > 1e-14 * sw * sxx)) return false;
    out = ((w * (sxx - dx * sx)) / denom).matrix().transpose();
    return true;
}

}  // namespace

Smoother buildSmoother(const Vector& column, double bandwidth) {
    if (!(bandwidth > 0)) throw NonpositiveBandwidth();
    const int n = static_cast<int>(column.size());
    if (n < 3) throw SingularLocalFit();
    double h = bandwidth;
    for (int attempt = 0; attempt <= 5; ++attempt) {
        Smoother sm;
        sm.design = column;
        sm.bandwidth = h;
        sm.s.resize(n, n);
        bool ok = true;
        Eigen::RowVectorXd row(n);
        for (int i = 0; i < n && ok; ++i) {
            ok = localLinearRow(column, column[i], h, row);
            if (ok) sm.s.row(i) = row;
        }
        if (ok) return sm;
        h *= 1.5;
    }
    throw SingularLocalFit();
}

Vector smoothApply(const Matrix& s, const Vector& values) {
    if (s.cols() != values.size()) throw DimensionMismatch(s.cols(), values.size());
    return s * values;
}

Vector extendFit(const Vector& design, const Vector& fitted, const Vector& newPoints) {
    if (design.size() != fitted.size()) throw DimensionMismatch(design.size(), fitted.size());
    const int n = static_cast<int>(design.size());
    if (n == 0) throw DimensionMismatch(1, 0);

    // Sorted unique knots; duplicate design values get the mean fitted value.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return design[a] < design[b]; });
    std::vector<double> xs, ys;
    xs.reserve(n);
    ys.reserve(n);
    int i = 0;
    while (i < n) {
        int j = i;
        double sum = 0;
        while (j < n && design[order[j]] - design[order[i]] <= 1e-12) {
            sum += fitted[order[j]];
            ++j;
        }
        xs.push_back(design[order[i]]);
        ys.push_back(sum / (j - i));
        i = j;
    }

    const int m = static_cast<int>(xs.size());
    Vector out(newPoints.size());
    for (long q = 0; q < newPoints.size(); ++q) {
        const double x = newPoints[q];
        if (m == 1) {
            out[q] = ys[0];
            continue;
        }
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        int hi = static_cast<int>(it - xs.begin());
        hi = std::clamp(hi, 1, m - 1);
        const int lo = hi - 1;
        const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
        out[q] = ys[lo] + t * (ys[hi] - ys[lo]);
    }
    return out;
}

SmootherSet buildSmootherSet(const Matrix& data, const std::vector<double>& bandwidths,
                             int workers) {
    if (bandwidths.size() != static_cast<size_t>(data.cols()))
        throw DimensionMismatch(data.cols(), static_cast<long>(bandwidths.size()));
    SmootherSet set;
    set.smoothers.resize(data.cols());
    parallelFor(static_cast<int>(data.cols()), workers, [&](int j) {
        set.smoothers[j] = buildSmoother(data.col(j), bandwidths[j]);
    });
    return set;
}

}  // namespace sacca
