#include "sacca/kernel.hpp"

#include "sacca/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sacca {

double gaussianKernel(double x, double y, double h) {
    if (!(h > 0)) throw NonpositiveBandwidth();
    const double d = x - y;
    return std::exp(-d * d / (2.0 * h * h));
}

namespace {

double medianOf(std::vector<double>& v) {
    const size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    double hi = v[n / 2];
    if (n % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + n / 2);
    return 0.5 * (lo + hi);
}

}  // namespace

double pluginBandwidth(const Vector& column) {
    std::vector<double> pts(column.data(), column.data() + column.size());
    if (pts.size() > 2000) {
        // Deterministic strided subsample of the sorted values.
        std::sort(pts.begin(), pts.end());
        std::vector<double> sub;
        sub.reserve(2000);
        const double stride = static_cast<double>(pts.size()) / 2000.0;
        for (int i = 0; i < 2000; ++i)
            sub.push_back(pts[static_cast<size_t>(i * stride)]);
        pts.swap(sub);
    }
    const size_t n = pts.size();
    if (n < 2) throw DegenerateColumn();
    std::vector<double> diffs;
    diffs.reserve(n * (n - 1) / 2);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) diffs.push_back(std::abs(pts[i] - pts[j]));
    double med = medianOf(diffs);
    if (med > 0) return med;
    // Heavily tied column: fall back to the median of the positive gaps.
    std::vector<double> pos;
    for (double d : diffs)
        if (d > 0) pos.push_back(d);
    if (pos.empty()) throw DegenerateColumn();
    return medianOf(pos);
}

std::vector<double> pluginBandwidths(const Matrix& data) {
    std::vector<double> h(data.cols());
    for (int j = 0; j < data.cols(); ++j) h[j] = pluginBandwidth(data.col(j));
    return h;
}

Gram buildGram(const Vector& column, double bandwidth, KernelType kernel) {
    const int n = static_cast<int>(column.size());
    Gram g;
    g.design = column;
    g.bandwidth = bandwidth;
    g.kernel = kernel;
    Matrix raw(n, n);
    if (kernel == KernelType::gaussian) {
        if (!(bandwidth > 0)) throw NonpositiveBandwidth();
        const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
        for (int i = 0; i < n; ++i) {
            raw(i, i) = 1.0;
            for (int j = i + 1; j < n; ++j) {
                const double d = column[i] - column[j];
                raw(i, j) = raw(j, i) = std::exp(-d * d * inv);
            }
        }
    } else {
        raw = column * column.transpose();
    }
    g.rawRowMean = raw.rowwise().mean();
    g.rawGrandMean = g.rawRowMean.mean();
    // K <- H K H done as rank-one corrections rather than two products.
    g.k = raw;
    g.k.colwise() -= g.rawRowMean;
    g.k.rowwise() -= g.rawRowMean.transpose();
    g.k.array() += g.rawGrandMean;
    g.k = 0.5 * (g.k + g.k.transpose());
    return g;
}

GramSet buildGramSet(const Matrix& data, const std::vector<double>& bandwidths,
                     KernelType kernel, int workers) {
    if (bandwidths.size() != static_cast<size_t>(data.cols()))
        throw DimensionMismatch(data.cols(), static_cast<long>(bandwidths.size()));
    GramSet set;
    set.grams.resize(data.cols());
    parallelFor(static_cast<int>(data.cols()), workers, [&](int j) {
        set.grams[j] = buildGram(data.col(j), bandwidths[j], kernel);
    });
    return set;
}

Vector centeredKernelVector(const Gram& g, double x) {
    const int n = static_cast<int>(g.design.size());
    Vector v(n);
    if (g.kernel == KernelType::gaussian) {
        const double inv = 1.0 / (2.0 * g.bandwidth * g.bandwidth);
        for (int i = 0; i < n; ++i) {
            const double d = x - g.design[i];
            v[i] = std::exp(-d * d * inv);
        }
    } else {
        v = x * g.design;
    }
    const double rowMean = v.mean();
    v = v.array() - rowMean;
    v -= g.rawRowMean;
    v.array() += g.rawGrandMean;
    return v;
}

namespace {

GenEigResult denseTopGenEig(const Matrix& a, const Eigen::LLT<Matrix>& llt) {
    const Matrix l = llt.matrixL();
    // C = L^-1 A L^-T, symmetric; top eigenpair maps back through L^-T.
    Matrix c = l.triangularView<Eigen::Lower>().solve(a);
    c = l.triangularView<Eigen::Lower>().solve(Matrix(c.transpose())).transpose();
    c = 0.5 * (c + c.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    const long top = c.rows() - 1;  // eigenvalues ascending
    GenEigResult r;
    r.value = es.eigenvalues()[top];
    Vector q = es.eigenvectors().col(top);
    r.vector = l.transpose().triangularView<Eigen::Upper>().solve(q);
    return r;
}

GenEigResult iterativeTopGenEig(const Matrix& a, const Eigen::LLT<Matrix>& llt,
                                double tol, int maxIter, bool& converged) {
    const long n = a.rows();
    const double aScale = a.norm();
    const Matrix l = llt.matrixL();
    auto applyC = [&](const Vector& v) -> Vector {
        Vector w = l.transpose().triangularView<Eigen::Upper>().solve(v);
        w = a * w;
        return Vector(l.triangularView<Eigen::Lower>().solve(w));
    };
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> gauss;
    Vector v(n);
    for (long i = 0; i < n; ++i) v[i] = gauss(rng);
    v.normalize();
    // Shift so the largest algebraic eigenvalue dominates the shifted pencil.
    double shift = aScale / std::sqrt(l.diagonal().minCoeff());
    shift = std::max(shift, 1.0);
    double rho = 0;
    converged = false;
    for (int it = 0; it < maxIter; ++it) {
        Vector cv = applyC(v);
        rho = v.dot(cv);
        if ((cv - rho * v).norm() <= tol * std::max(aScale, 1e-300)) {
            converged = true;
            break;
        }
        v = (cv + shift * v).normalized();
    }
    GenEigResult r;
    r.value = rho;
    r.vector = l.transpose().triangularView<Eigen::Upper>().solve(v);
    return r;
}

}  // namespace

GenEigResult topGenEig(const Matrix& a, const Matrix& b, double tol) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw DimensionMismatch(a.rows(), b.rows());
    const long n = a.rows();
    const double aScale = a.norm();

    Matrix bWork = b;
    Eigen::LLT<Matrix> llt(bWork);
    bool ridged = false;
    if (llt.info() != Eigen::Success) {
        bWork.diagonal().array() += 1e-8 * bWork.trace() / static_cast<double>(n);
        llt.compute(bWork);
        ridged = true;
        if (llt.info() != Eigen::Success) throw NotPositiveDefinite();
    }

    auto finish = [&](GenEigResult r) {
        double bn = std::sqrt(std::max(r.vector.dot(bWork * r.vector), 1e-300));
        r.vector /= bn;
        r.residualNorm = (a * r.vector - r.value * (bWork * r.vector)).norm();
        return r;
    };

    GenEigResult result;
    if (n > 2500) {
        bool ok = false;
        result = finish(iterativeTopGenEig(a, llt, tol, 3000, ok));
        if (ok && result.residualNorm <= tol * std::max(aScale, 1e-300)) return result;
    }
    result = finish(denseTopGenEig(a, llt));
    if (!ridged && !(result.residualNorm <= tol * std::max(aScale, 1e-300))) {
        // Near-singular metric: retry once with the ridge.
        bWork.diagonal().array() += 1e-8 * bWork.trace() / static_cast<double>(n);
        llt.compute(bWork);
        if (llt.info() != Eigen::Success) throw NotPositiveDefinite();
        result = finish(denseTopGenEig(a, llt));
    }
    return result;
}

}  // namespace sacca
