#include "sacca/baselines.hpp"

#include "sacca/kcca.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sacca {

LinearCcaSolution linearCca(const PairedDataset& data, double ridge) {
    const double n = data.n();
    const int p1 = data.p1(), p2 = data.p2();
    Matrix sxx = data.x.transpose() * data.x / n;
    Matrix syy = data.y.transpose() * data.y / n;
    Matrix sxy = data.x.transpose() * data.y / n;
    sxx.diagonal().array() += ridge * sxx.trace() / p1;
    syy.diagonal().array() += ridge * syy.trace() / p2;

    Matrix a = Matrix::Zero(p1 + p2, p1 + p2);
    a.topRightCorner(p1, p2) = sxy;
    a.bottomLeftCorner(p2, p1) = sxy.transpose();
    Matrix b = Matrix::Zero(p1 + p2, p1 + p2);
    b.topLeftCorner(p1, p1) = sxx;
    b.bottomRightCorner(p2, p2) = syy;

    GenEigResult eig = topGenEig(a, b);
    LinearCcaSolution sol;
    sol.u = eig.vector.head(p1);
    sol.v = eig.vector.tail(p2);
    const double qu = sol.u.dot(sxx * sol.u);
    const double qv = sol.v.dot(syy * sol.v);
    if (qu > 1e-24) sol.u /= std::sqrt(qu);
    if (qv > 1e-24) sol.v /= std::sqrt(qv);
    sol.correlation = sol.u.dot(sxy * sol.v);
    if (sol.correlation < 0) {
        sol.v = -sol.v;
        sol.correlation = -sol.correlation;
    }
    return sol;
}

namespace {

// Soft-threshold a and l2-normalize, with the threshold bisected so the
// normalized vector's l1 norm is within the budget.
Vector thresholdedUnit(const Vector& a, double budget) {
    auto apply = [&](double theta) -> Vector {
        Vector s = a.array().sign() * (a.array().abs() - theta).max(0.0);
        const double nrm = s.norm();
        if (nrm > 1e-300) s /= nrm;
        return s;
    };
    Vector plain = apply(0);
    if (plain.lpNorm<1>() <= budget + 1e-12) return plain;
    double lo = 0, hi = a.array().abs().maxCoeff();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double l1 = apply(mid).lpNorm<1>();
        if (std::abs(l1 - budget) <= 1e-10) return apply(mid);
        (l1 > budget ? lo : hi) = mid;
    }
    return apply(hi);
}

}  // namespace

LinearCcaSolution sparseLinearCca(const PairedDataset& data, double c1, double c2,
                                  int maxIter) {
    const double n = data.n();
    Matrix cross = data.x.transpose() * data.y / n;
    LinearCcaSolution sol;
    sol.u = Vector::Zero(data.p1());
    sol.v = Vector::Ones(data.p2()).normalized();
    // A few plain power steps give a deterministic dominant-pair start.
    for (int it = 0; it < 30; ++it) {
        Vector u = cross * sol.v;
        if (u.norm() < 1e-300) break;
        u.normalize();
        Vector v = cross.transpose() * u;
        if (v.norm() < 1e-300) break;
        sol.v = v.normalized();
        sol.u = u;
    }
    double prev = -2;
    for (int it = 0; it < maxIter; ++it) {
        Vector au = cross * sol.v;
        if (au.norm() < 1e-300) {
            sol.u.setZero();
            break;
        }
        sol.u = thresholdedUnit(au, c1);
        Vector av = cross.transpose() * sol.u;
        if (av.norm() < 1e-300) {
            sol.v.setZero();
            break;
        }
        sol.v = thresholdedUnit(av, c2);
        const double corr = sol.u.dot(cross * sol.v);
        if (std::abs(corr - prev) < 1e-6) break;
        prev = corr;
    }
    sol.correlation = sol.u.dot(cross * sol.v);
    if (sol.correlation < 0) {
        sol.v = -sol.v;
        sol.correlation = -sol.correlation;
    }
    return sol;
}

double medianRowDistance(const Matrix& m) {
    const int n = static_cast<int>(m.rows());
    std::vector<double> d;
    d.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) d.push_back((m.row(i) - m.row(j)).norm());
    if (d.empty()) throw DegenerateColumn();
    std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
    double hi = d[d.size() / 2];
    if (d.size() % 2 == 1) return hi;
    double lo = *std::max_element(d.begin(), d.begin() + d.size() / 2);
    return 0.5 * (lo + hi);
}

namespace {

Matrix multivariateGram(const Matrix& rows, double h) {
    const int n = static_cast<int>(rows.rows());
    Matrix k(n, n);
    const double inv = 1.0 / (2.0 * h * h);
    for (int i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            const double d2 = (rows.row(i) - rows.row(j)).squaredNorm();
            k(i, j) = k(j, i) = std::exp(-d2 * inv);
        }
    }
    return k;
}

struct CenteredGram {
    Matrix k;
    Vector rowMean;
    double grandMean = 0;
};

CenteredGram centerGram(Matrix raw) {
    CenteredGram g;
    g.rowMean = raw.rowwise().mean();
    g.grandMean = g.rowMean.mean();
    raw.colwise() -= g.rowMean;
    raw.rowwise() -= g.rowMean.transpose();
    raw.array() += g.grandMean;
    g.k = 0.5 * (raw + raw.transpose());
    return g;
}

}  // namespace

FullKccaModel fullKcca(const PairedDataset& data, double gamma, double bwX, double bwY) {
    if (!(gamma > 0)) throw ConfigError("fullKcca requires gamma > 0");
    FullKccaModel model;
    model.trainX = data.x;
    model.trainY = data.y;
    model.bwX = bwX > 0 ? bwX : medianRowDistance(data.x);
    model.bwY = bwY > 0 ? bwY : medianRowDistance(data.y);
    const int n = data.n();

    CenteredGram gx = centerGram(multivariateGram(data.x, model.bwX));
    CenteredGram gy = centerGram(multivariateGram(data.y, model.bwY));
    model.rowMeanX = gx.rowMean;
    model.rowMeanY = gy.rowMean;
    model.grandMeanX = gx.grandMean;
    model.grandMeanY = gy.grandMean;

    Gram wrapX{gx.k, Vector(), 1.0, KernelType::gaussian, gx.rowMean, gx.grandMean};
    Gram wrapY{gy.k, Vector(), 1.0, KernelType::gaussian, gy.rowMean, gy.grandMean};
    GramBasis bx = gramBasis(wrapX);
    GramBasis by = gramBasis(wrapY);
    const int dx = static_cast<int>(bx.d.size());
    const int dy = static_cast<int>(by.d.size());
    if (dx == 0 || dy == 0) throw NotPositiveDefinite();

    Matrix a = Matrix::Zero(dx + dy, dx + dy);
    a.topRightCorner(dx, dy) = bx.b.transpose() * by.b / static_cast<double>(n);
    a.bottomLeftCorner(dy, dx) = a.topRightCorner(dx, dy).transpose();
    Matrix b = Matrix::Zero(dx + dy, dx + dy);
    for (int i = 0; i < dx; ++i) b(i, i) = 1.0 / n + gamma / bx.d[i];
    for (int i = 0; i < dy; ++i) b(dx + i, dx + i) = 1.0 / n + gamma / by.d[i];

    GenEigResult eig = topGenEig(a, b);
    model.objective = eig.value;
    Vector zx = eig.vector.head(dx);
    Vector zy = eig.vector.tail(dy);
    model.alpha = bx.b * (zx.array() / bx.d.array()).matrix();
    model.beta = by.b * (zy.array() / by.d.array()).matrix();
    Vector f = gx.k * model.alpha;
    Vector g = gy.k * model.beta;
    model.correlation = pearson(f, g);
    if (model.correlation < 0) {
        model.beta = -model.beta;
        model.correlation = -model.correlation;
    }
    return model;
}

BaselineEval evaluateLinear(const LinearCcaSolution& sol, const PairedDataset& newData) {
    BaselineEval r;
    r.fValues = newData.x * sol.u;
    r.gValues = newData.y * sol.v;
    if (sol.u.norm() < 1e-300 || sol.v.norm() < 1e-300) {
        r.correlation = 0;
        return r;
    }
    r.correlation = pearson(r.fValues, r.gValues);
    return r;
}

BaselineEval evaluateFullKcca(const FullKccaModel& model, const PairedDataset& newData) {
    const int n = static_cast<int>(model.trainX.rows());
    const int m = newData.n();
    BaselineEval r;
    r.fValues.resize(m);
    r.gValues.resize(m);
    const double invX = 1.0 / (2.0 * model.bwX * model.bwX);
    const double invY = 1.0 / (2.0 * model.bwY * model.bwY);
    for (int i = 0; i < m; ++i) {
        Vector kx(n), ky(n);
        for (int t = 0; t < n; ++t) {
            kx[t] = std::exp(-(newData.x.row(i) - model.trainX.row(t)).squaredNorm() * invX);
            ky[t] = std::exp(-(newData.y.row(i) - model.trainY.row(t)).squaredNorm() * invY);
        }
        kx.array() -= kx.mean();
        kx -= model.rowMeanX;
        kx.array() += model.grandMeanX;
        ky.array() -= ky.mean();
        ky -= model.rowMeanY;
        ky.array() += model.grandMeanY;
        r.fValues[i] = kx.dot(model.alpha);
        r.gValues[i] = ky.dot(model.beta);
    }
    r.correlation = pearson(r.fValues, r.gValues);
    return r;
}

}  // namespace sacca
