#include "sacca/kcca.hpp"

#include "sacca/parallel.hpp"

#include <cmath>

namespace sacca {

GramBasis gramBasis(const Gram& g, double relCutoff) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(g.k);
    const Vector& ev = es.eigenvalues();  // ascending
    const double cutoff = std::max(ev.maxCoeff(), 0.0) * relCutoff;
    int r = 0;
    for (long i = 0; i < ev.size(); ++i)
        if (ev[i] > cutoff) ++r;
    GramBasis basis;
    basis.b.resize(g.k.rows(), r);
    basis.d.resize(r);
    for (int i = 0; i < r; ++i) {
        const long src = ev.size() - 1 - i;  // descending order
        basis.b.col(i) = es.eigenvectors().col(src);
        basis.d[i] = ev[src];
    }
    return basis;
}

KccaSide makeKccaSide(GramSet grams, double relCutoff) {
    KccaSide side;
    side.grams = std::move(grams.grams);
    const int p = static_cast<int>(side.grams.size());
    side.bases.resize(p);
    side.offsets.assign(1, 0);
    for (int j = 0; j < p; ++j) {
        side.bases[j] = gramBasis(side.grams[j], relCutoff);
        side.offsets.push_back(side.offsets.back() +
                               static_cast<int>(side.bases[j].d.size()));
    }
    const int n = static_cast<int>(side.grams.empty() ? 0 : side.grams[0].k.rows());
    side.stacked.resize(n, side.dim());
    for (int j = 0; j < p; ++j)
        side.stacked.middleCols(side.blockStart(j), side.blockSize(j)) = side.bases[j].b;
    side.crossGram = side.stacked.transpose() * side.stacked / static_cast<double>(n);
    return side;
}

Vector kccaGroupNorms(const KccaSide& side, const Vector& z, int n) {
    Vector norms(side.covariates());
    const double invSqrtN = 1.0 / std::sqrt(static_cast<double>(n));
    for (int j = 0; j < side.covariates(); ++j)
        norms[j] = z.segment(side.blockStart(j), side.blockSize(j)).norm() * invSqrtN;
    return norms;
}

Matrix kccaAlpha(const KccaSide& side, const Vector& z) {
    const int n = static_cast<int>(side.stacked.rows());
    Matrix alpha(n, side.covariates());
    for (int j = 0; j < side.covariates(); ++j) {
        const GramBasis& b = side.bases[j];
        Vector zj = z.segment(side.blockStart(j), side.blockSize(j));
        alpha.col(j) = b.b * (zj.array() / b.d.array()).matrix();
    }
    return alpha;
}

namespace {

// Metric of one side in coefficient space: (1/n) B^T B + gamma diag(1/d).
Matrix sideMetric(const KccaSide& side, double gamma) {
    Matrix m = side.crossGram;
    for (int j = 0; j < side.covariates(); ++j) {
        const GramBasis& b = side.bases[j];
        for (int i = 0; i < b.d.size(); ++i)
            m(side.blockStart(j) + i, side.blockStart(j) + i) += gamma / b.d[i];
    }
    return m;
}

double quadForm(const Matrix& q, const Vector& z) { return z.dot(q * z); }

}  // namespace

KccaCoefficients nonsparseAdditiveKcca(const KccaSide& x, const KccaSide& y,
                                       double gammaF, double gammaG) {
    const int n = static_cast<int>(x.stacked.rows());
    const int dx = x.dim(), dy = y.dim();
    Matrix a = Matrix::Zero(dx + dy, dx + dy);
    a.topRightCorner(dx, dy) = x.stacked.transpose() * y.stacked / static_cast<double>(n);
    a.bottomLeftCorner(dy, dx) = a.topRightCorner(dx, dy).transpose();

    Matrix b = Matrix::Zero(dx + dy, dx + dy);
    b.topLeftCorner(dx, dx) = sideMetric(x, gammaF);
    b.bottomRightCorner(dy, dy) = sideMetric(y, gammaG);

    GenEigResult eig = topGenEig(a, b);
    KccaCoefficients c;
    c.zx = eig.vector.head(dx);
    c.zy = eig.vector.tail(dy);
    const double qx = quadForm(b.topLeftCorner(dx, dx), c.zx);
    const double qy = quadForm(b.bottomRightCorner(dy, dy), c.zy);
    if (qx > 1e-24) c.zx /= std::sqrt(qx);
    if (qy > 1e-24) c.zy /= std::sqrt(qy);
    if ((x.stacked * c.zx).dot(y.stacked * c.zy) < 0) c.zy = -c.zy;
    return c;
}

namespace {

struct PenalizedSolver {
    const KccaSide& side;
    double gamma;
    Vector c;        // linear term
    Vector diagE;    // diagonal of Q per coordinate: 1/n + gamma/d
    double n;

    PenalizedSolver(const KccaSide& s, double g, const Vector& target)
        : side(s), gamma(g), n(static_cast<double>(s.stacked.rows())) {
        c = s.stacked.transpose() * target / n;
        diagE.resize(s.dim());
        for (int j = 0; j < s.covariates(); ++j)
            for (int i = 0; i < s.bases[j].d.size(); ++i)
                diagE[s.blockStart(j) + i] = 1.0 / n + gamma / s.bases[j].d[i];
    }

    Vector qTimes(const Vector& z) const {
        return side.crossGram * z + (diagE.array() - 1.0 / n).matrix().cwiseProduct(z);
    }

    // Exact minimizer of (1/2) z_j' E_j z_j - r' z_j + nu |z_j| for the
    // diagonal block E_j; the scale solves a one-dimensional fixed point.
    Vector blockProx(int j, const Vector& r, double nu) const {
        const int off = side.blockStart(j), sz = side.blockSize(j);
        const auto e = diagE.segment(off, sz).array();
        if (nu <= 0) return (r.array() / e).matrix();
        if (r.norm() <= nu) return Vector::Zero(sz);
        auto normAt = [&](double s) {
            return std::sqrt((r.array() / (e + nu / s)).square().sum());
        };
        double hi = std::sqrt((r.array() / e).square().sum());
        double lo = 0;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= 0) break;
            (normAt(mid) > mid ? lo : hi) = mid;
        }
        const double s = 0.5 * (lo + hi);
        return (r.array() / (e + nu / s)).matrix();
    }

    // Blockwise coordinate descent on the mu-penalized problem.
    void solve(Vector& z, double mu, int maxSweeps = 400, double tol = 1e-10) const {
        const double nu = mu / std::sqrt(n);
        Vector gvec = side.crossGram * z;
        const double scale = std::max(c.norm(), 1e-12);
        for (int sweep = 0; sweep < maxSweeps; ++sweep) {
            double maxChange = 0;
            for (int j = 0; j < side.covariates(); ++j) {
                const int off = side.blockStart(j), sz = side.blockSize(j);
                Vector zj = z.segment(off, sz);
                // Off-block part of Q z is gvec - z_j/n; the gamma/d piece is
                // block-local and lives inside blockProx's diagonal.
                Vector r = c.segment(off, sz) - gvec.segment(off, sz) + zj / n;
                Vector znew = blockProx(j, r, nu);
                Vector dz = znew - zj;
                const double change = dz.norm();
                if (change > 0) {
                    z.segment(off, sz) = znew;
                    gvec += side.crossGram.middleCols(off, sz) * dz;
                    maxChange = std::max(maxChange, change);
                }
            }
            if (maxChange <= tol * scale) break;
        }
    }

    double kktResidual(const Vector& z, double mu) const {
        const double nu = mu / std::sqrt(n);
        Vector grad = c - qTimes(z);
        double worst = 0;
        for (int j = 0; j < side.covariates(); ++j) {
            Vector gj = grad.segment(side.blockStart(j), side.blockSize(j));
            Vector zj = z.segment(side.blockStart(j), side.blockSize(j));
            const double nz = zj.norm();
            if (nz > 1e-14) {
                worst = std::max(worst, (gj - nu * zj / nz).norm());
            } else {
                worst = std::max(worst, std::max(0.0, gj.norm() - nu));
            }
        }
        return worst;
    }
};

}  // namespace

Vector sparseSubproblem(const Vector& target, const KccaSide& side, double gamma,
                        double budget, const Vector* warmStart, SubproblemDiag* diag) {
    if (target.norm() < 1e-12) throw ZeroTarget();
    const double n = static_cast<double>(side.stacked.rows());
    PenalizedSolver solver(side, gamma, target);
    Matrix metric = sideMetric(side, gamma);

    auto rescaled = [&](const Vector& z, double* quad) -> Vector {
        const double q = quadForm(metric, z);
        if (quad) *quad = q;
        if (q < 1e-28) return z;
        return z / std::sqrt(q);
    };
    auto l1Of = [&](const Vector& z) {
        return kccaGroupNorms(side, z, static_cast<int>(n)).sum();
    };

    SubproblemDiag local;
    Vector z = warmStart && warmStart->size() == side.dim() ? *warmStart
                                                           : Vector::Zero(side.dim());

    // mu = 0: unconstrained-over-the-ball maximizer, solved exactly.
    Vector z0 = metric.ldlt().solve(solver.c);
    double quad = 0;
    Vector cand = rescaled(z0, &quad);
    if (l1Of(cand) <= budget + 1e-9) {
        local.mu = 0;
        local.lambda = quad > 0 ? 0.5 * std::sqrt(quad) : 0;
        z = cand;
    } else {
        double muLo = 0;
        double muHi = 0;
        for (int j = 0; j < side.covariates(); ++j)
            muHi = std::max(muHi,
                            solver.c.segment(side.blockStart(j), side.blockSize(j)).norm());
        muHi *= std::sqrt(n) * 1.0000001;
        Vector zPen = z0;
        int steps = 0;
        double mu = 0;
        for (; steps < 80; ++steps) {
            mu = 0.5 * (muLo + muHi);
            solver.solve(zPen, mu);
            if (zPen.norm() < 1e-300 || l1Of(rescaled(zPen, nullptr)) < budget)
                muHi = mu;
            else
                muLo = mu;
            if (muHi - muLo <= 1e-12 * std::max(muHi, 1.0)) break;
        }
        mu = muLo > 0 ? muLo : 0.5 * (muLo + muHi);
        solver.solve(zPen, mu, 2000, 1e-12);
        local.mu = mu;
        local.bisectionSteps = steps;
        local.budgetTight = true;
        double q = 0;
        z = rescaled(zPen, &q);
        local.lambda = q > 0 ? 0.5 / (1.0 / std::sqrt(q)) : 0;
        local.kktResidual = solver.kktResidual(zPen, mu);
    }
    if (local.mu == 0) {
        local.kktResidual = solver.kktResidual(z0, 0);
    }
    local.l1 = l1Of(z);
    if (diag) *diag = local;
    return z;
}

IndexList KccaModel::supportX(double tol) const {
    IndexList s;
    for (int j = 0; j < fNorms.size(); ++j)
        if (fNorms[j] > tol) s.push_back(j);
    return s;
}

IndexList KccaModel::supportY(double tol) const {
    IndexList s;
    for (int k = 0; k < gNorms.size(); ++k)
        if (gNorms[k] > tol) s.push_back(k);
    return s;
}

KccaModel fitSaKccaOnSides(KccaSide sideX, KccaSide sideY, const KccaHyper& hyper,
                           const KccaCoefficients* init) {
    KccaModel model;
    model.sideX = std::move(sideX);
    model.sideY = std::move(sideY);
    model.hyper = hyper;
    const int n = static_cast<int>(model.sideX.stacked.rows());

    KccaCoefficients coeffs;
    if (init && init->zx.size() == model.sideX.dim() && init->zy.size() == model.sideY.dim())
        coeffs = *init;
    else
        coeffs = nonsparseAdditiveKcca(model.sideX, model.sideY, hyper.gammaF, hyper.gammaG);

    double prevObjective = -1e300;
    for (int it = 0; it < hyper.maxIter; ++it) {
        Vector gsum = model.sideY.stacked * coeffs.zy;
        coeffs.zx = sparseSubproblem(gsum, model.sideX, hyper.gammaF, hyper.cf, &coeffs.zx);
        Vector fsum = model.sideX.stacked * coeffs.zx;
        coeffs.zy = sparseSubproblem(fsum, model.sideY, hyper.gammaG, hyper.cg, &coeffs.zy);

        model.objective = (model.sideX.stacked * coeffs.zx)
                              .dot(model.sideY.stacked * coeffs.zy) /
                          static_cast<double>(n);
        model.objectiveTrace.push_back(model.objective);
        model.iterations = it + 1;
        if (std::abs(model.objective - prevObjective) < hyper.tol) {
            model.converged = true;
            break;
        }
        prevObjective = model.objective;
    }
    model.coeffs = coeffs;
    model.fNorms = kccaGroupNorms(model.sideX, coeffs.zx, n);
    model.gNorms = kccaGroupNorms(model.sideY, coeffs.zy, n);
    return model;
}

KccaModel fitSaKcca(const PairedDataset& data, const KccaHyper& hyper,
                    const KccaCoefficients* init, int workers) {
    KccaHyper h = hyper;
    if (h.bwX.empty() && h.kernel == KernelType::gaussian) h.bwX = pluginBandwidths(data.x);
    if (h.bwY.empty() && h.kernel == KernelType::gaussian) h.bwY = pluginBandwidths(data.y);
    if (h.bwX.empty()) h.bwX.assign(data.p1(), 1.0);
    if (h.bwY.empty()) h.bwY.assign(data.p2(), 1.0);
    KccaSide sx = makeKccaSide(buildGramSet(data.x, h.bwX, h.kernel, workers));
    KccaSide sy = makeKccaSide(buildGramSet(data.y, h.bwY, h.kernel, workers));
    return fitSaKccaOnSides(std::move(sx), std::move(sy), h, init);
}

KccaEvalResult evaluateKcca(const KccaModel& model, const PairedDataset& newData) {
    if (newData.p1() != model.sideX.covariates() || newData.p2() != model.sideY.covariates())
        throw DimensionMismatch(model.sideX.covariates(), newData.p1());
    const int m = newData.n();
    KccaEvalResult r;
    r.fValues = Vector::Zero(m);
    r.gValues = Vector::Zero(m);
    Matrix alphaX = kccaAlpha(model.sideX, model.coeffs.zx);
    Matrix alphaY = kccaAlpha(model.sideY, model.coeffs.zy);
    for (int j = 0; j < newData.p1(); ++j) {
        if (model.fNorms[j] <= 1e-12) continue;
        for (int i = 0; i < m; ++i)
            r.fValues[i] += centeredKernelVector(model.sideX.grams[j], newData.x(i, j))
                                .dot(alphaX.col(j));
    }
    for (int k = 0; k < newData.p2(); ++k) {
        if (model.gNorms[k] <= 1e-12) continue;
        for (int i = 0; i < m; ++i)
            r.gValues[i] += centeredKernelVector(model.sideY.grams[k], newData.y(i, k))
                                .dot(alphaY.col(k));
    }
    if (model.supportX().empty() || model.supportY().empty()) {
        r.correlation = 0;
        return r;
    }
    r.correlation = pearson(r.fValues, r.gValues);
    return r;
}

}  // namespace sacca
