#include "sacca/fcca.hpp"

#include "sacca/kernel.hpp"
#include "sacca/parallel.hpp"

#include <cmath>
#include <random>

namespace sacca {

void AdditiveFit::recompute() {
    const int p = static_cast<int>(values.rows());
    groupNorms.resize(p);
    for (int j = 0; j < p; ++j) groupNorms[j] = rmsNorm(values.row(j).transpose());
    totalL1 = groupNorms.sum();
    totalL2sq = groupNorms.squaredNorm();
}

IndexList AdditiveFit::support(double tol) const {
    IndexList s;
    for (int j = 0; j < groupNorms.size(); ++j)
        if (groupNorms[j] > tol) s.push_back(j);
    return s;
}

Vector AdditiveFit::sum() const {
    return values.colwise().sum().transpose();
}

AdditiveFit zeroFit(int p, int n) {
    AdditiveFit f;
    f.values = Matrix::Zero(p, n);
    f.recompute();
    return f;
}

AdditiveFit fitFromValues(Matrix values) {
    AdditiveFit f;
    f.values = std::move(values);
    f.recompute();
    return f;
}

AdditiveFit randomInit(int p, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Matrix v(p, n);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) v(j, i) = gauss(rng);
    for (int j = 0; j < p; ++j) v.row(j).array() -= v.row(j).mean();
    AdditiveFit f = fitFromValues(std::move(v));
    if (f.totalL2sq > 0) {
        f.values /= std::sqrt(f.totalL2sq);
        f.recompute();
    }
    return f;
}

AdditiveFit softThresholdUpdate(const std::vector<Vector>& smoothed, double budget,
                                ThresholdDiag* diag) {
    const int p = static_cast<int>(smoothed.size());
    if (p == 0) throw AllSmoothedZero();
    const int n = static_cast<int>(smoothed[0].size());

    Vector norms(p);
    for (int j = 0; j < p; ++j) norms[j] = rmsNorm(smoothed[j]);
    const double maxNorm = norms.maxCoeff();
    if (maxNorm < 1e-12) throw AllSmoothedZero();

    ThresholdDiag local;
    AdditiveFit fit;
    fit.values = Matrix::Zero(p, n);

    const double lambda0 = std::sqrt(norms.squaredNorm());
    const double l1Plain = norms.sum() / lambda0;
    if (l1Plain <= budget + 1e-12) {
        for (int j = 0; j < p; ++j) fit.values.row(j) = smoothed[j].transpose() / lambda0;
        local.branch = ThresholdBranch::none;
        local.lambda = lambda0;
    } else {
        // Maximum-norm fallback: keep the tied-at-max components, scale their
        // l1 mass to the budget. Valid only while that keeps total energy <= 1.
        IndexList ties;
        for (int j = 0; j < p; ++j)
            if (norms[j] >= maxNorm * (1.0 - 1e-12)) ties.push_back(j);
        const double m = static_cast<double>(ties.size());
        if (budget * budget <= m * (1.0 + 1e-12)) {
            double tieMass = 0;
            for (int j : ties) tieMass += norms[j];
            for (int j : ties) fit.values.row(j) = budget * smoothed[j].transpose() / tieMass;
            local.branch = ThresholdBranch::maxNormFallback;
        } else {
            auto l1At = [&](double gamma) {
                double sum = 0, sumSq = 0;
                for (int j = 0; j < p; ++j) {
                    if (norms[j] <= gamma) continue;
                    const double mj = norms[j] - gamma;
                    sum += mj;
                    sumSq += mj * mj;
                }
                return sumSq > 0 ? sum / std::sqrt(sumSq) : 0.0;
            };
            double lo = 0, hi = maxNorm;
            int steps = 0;
            for (; steps < 200; ++steps) {
                const double mid = 0.5 * (lo + hi);
                const double l1 = l1At(mid);
                if (std::abs(l1 - budget) <= 1e-8) {
                    lo = hi = mid;
                    break;
                }
                (l1 > budget ? lo : hi) = mid;
            }
            const double gamma = 0.5 * (lo + hi);
            double lambdaSq = 0;
            for (int j = 0; j < p; ++j) {
                const double mj = norms[j] - gamma;
                if (mj > 0) lambdaSq += mj * mj;
            }
            const double lambda = std::sqrt(lambdaSq);
            for (int j = 0; j < p; ++j) {
                const double factor = 1.0 - gamma / norms[j];
                if (norms[j] > gamma && factor > 0)
                    fit.values.row(j) = factor * smoothed[j].transpose() / lambda;
            }
            local.branch = ThresholdBranch::softThreshold;
            local.gamma = gamma;
            local.lambda = lambda;
            local.bisectionSteps = steps;
        }
    }
    fit.recompute();
    if (diag) *diag = local;
    return fit;
}

double fccaObjective(const AdditiveFit& f, const AdditiveFit& g) {
    const Vector fs = f.sum();
    const Vector gs = g.sum();
    return fs.dot(gs) / static_cast<double>(fs.size());
}

namespace {

void centerRows(AdditiveFit& fit) {
    for (int j = 0; j < fit.values.rows(); ++j)
        fit.values.row(j).array() -= fit.values.row(j).mean();
    fit.recompute();
}

std::vector<Vector> smoothAgainst(const SmootherSet& smoothers, const Vector& target) {
    std::vector<Vector> out(smoothers.count());
    for (int j = 0; j < smoothers.count(); ++j)
        out[j] = smoothers.smoothers[j].s * target;
    return out;
}

}  // namespace

void backfitSweep(FccaModel& model, View view, double budget, ThresholdDiag* diag) {
    const bool isX = view == View::x;
    AdditiveFit& mine = isX ? model.f : model.g;
    const AdditiveFit& other = isX ? model.g : model.f;
    const SmootherSet& smoothers = isX ? model.smootherX : model.smootherY;

    const Vector target = other.sum();
    std::vector<Vector> smoothed = smoothAgainst(smoothers, target);
    // Center each component before the normalization so the post-update
    // energy and l1 invariants hold exactly.
    for (Vector& v : smoothed) v.array() -= v.mean();
    AdditiveFit updated = softThresholdUpdate(smoothed, budget, diag);

    double change = 0;
    if (mine.values.size() == updated.values.size())
        for (int j = 0; j < updated.values.rows(); ++j)
            change = std::max(change, rmsNorm((updated.values.row(j) - mine.values.row(j)).transpose()));
    mine = std::move(updated);

    model.objective = fccaObjective(model.f, model.g);
    model.objectiveTrace.push_back(model.objective);
    model.functionChangeTrace.push_back(change);
}

namespace {

void prepareModel(FccaModel& model, const PairedDataset& data, FccaHyper& hyper, int workers) {
    if (hyper.bwX.empty()) hyper.bwX = pluginBandwidths(data.x);
    if (hyper.bwY.empty()) hyper.bwY = pluginBandwidths(data.y);
    model.smootherX = buildSmootherSet(data.x, hyper.bwX, workers);
    model.smootherY = buildSmootherSet(data.y, hyper.bwY, workers);
    model.designX = data.x;
    model.designY = data.y;
    model.hyper = hyper;
}

}  // namespace

FccaModel fitFcca(const PairedDataset& data, const FccaHyper& hyper,
                  const AdditiveFit& gInit, int workers) {
    if (gInit.isZero()) throw ZeroTarget();
    if (gInit.values.rows() != data.p2() || gInit.values.cols() != data.n())
        throw DimensionMismatch(data.p2(), gInit.values.rows());

    FccaModel model;
    FccaHyper h = hyper;
    prepareModel(model, data, h, workers);
    model.hyper = h;
    model.f = zeroFit(data.p1(), data.n());
    model.g = gInit;
    centerRows(model.g);
    if (model.g.isZero()) throw ZeroTarget();

    double prevObjective = -1e300;
    for (int it = 0; it < h.maxIter; ++it) {
        backfitSweep(model, View::x, h.cf);
        backfitSweep(model, View::y, h.cg);
        model.iterations = it + 1;
        if (std::abs(model.objective - prevObjective) < h.tol) {
            model.converged = true;
            break;
        }
        prevObjective = model.objective;
    }
    return model;
}

FccaModel fitNonsparseFcca(const PairedDataset& data, FccaHyper hyper,
                           const AdditiveFit* gInit, int workers) {
    FccaModel model;
    prepareModel(model, data, hyper, workers);
    model.f = zeroFit(data.p1(), data.n());

    if (gInit && !gInit->isZero()) {
        model.g = *gInit;
    } else {
        // Start each g_k at its own (standardized) covariate.
        model.g = fitFromValues(data.y.transpose());
    }
    centerRows(model.g);
    if (model.g.isZero()) throw ZeroTarget();
    model.g.values /= std::sqrt(model.g.totalL2sq);
    model.g.recompute();

    // No-threshold sweeps: plain normalized smooth of the opposite sum.
    auto sweep = [&](View view) {
        const bool isX = view == View::x;
        AdditiveFit& mine = isX ? model.f : model.g;
        const AdditiveFit& other = isX ? model.g : model.f;
        const SmootherSet& smoothers = isX ? model.smootherX : model.smootherY;
        const Vector target = other.sum();
        auto smoothed = smoothAgainst(smoothers, target);
        Matrix vals(smoothers.count(), data.n());
        for (int j = 0; j < smoothers.count(); ++j) {
            vals.row(j) = smoothed[j].transpose();
            vals.row(j).array() -= vals.row(j).mean();
        }
        AdditiveFit updated = fitFromValues(std::move(vals));
        if (updated.totalL2sq < 1e-24) throw AllSmoothedZero();
        updated.values /= std::sqrt(updated.totalL2sq);
        updated.recompute();
        mine = std::move(updated);
        model.objective = fccaObjective(model.f, model.g);
        model.objectiveTrace.push_back(model.objective);
    };

    double prevObjective = -1e300;
    for (int it = 0; it < hyper.maxIter; ++it) {
        sweep(View::x);
        sweep(View::y);
        model.iterations = it + 1;
        if (std::abs(model.objective - prevObjective) < hyper.tol) {
            model.converged = true;
            break;
        }
        prevObjective = model.objective;
    }
    return model;
}

EvalResult evaluateFit(const FccaModel& model, const PairedDataset& newData) {
    if (newData.p1() != model.designX.cols() || newData.p2() != model.designY.cols())
        throw DimensionMismatch(model.designX.cols(), newData.p1());
    EvalResult r;
    const int m = newData.n();
    r.fValues = Vector::Zero(m);
    r.gValues = Vector::Zero(m);
    for (int j = 0; j < newData.p1(); ++j) {
        if (model.f.groupNorms[j] <= kSupportTol) continue;
        r.fValues += extendFit(model.designX.col(j), model.f.values.row(j).transpose(),
                               newData.x.col(j));
    }
    for (int k = 0; k < newData.p2(); ++k) {
        if (model.g.groupNorms[k] <= kSupportTol) continue;
        r.gValues += extendFit(model.designY.col(k), model.g.values.row(k).transpose(),
                               newData.y.col(k));
    }
    if (model.f.support().empty() || model.g.support().empty()) {
        r.correlation = 0;
        return r;
    }
    r.correlation = pearson(r.fValues, r.gValues);
    return r;
}

}  // namespace sacca
