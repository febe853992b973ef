#include "sacca/screening.hpp"

#include "sacca/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace sacca {

namespace {

Vector subset(const Vector& v, const IndexList& idx) {
    Vector out(static_cast<long>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) out[static_cast<long>(i)] = v[idx[i]];
    return out;
}

struct PairSide {
    Vector train, holdout;
    double bandwidth = 0;
};

PairSide makePairSide(const Vector& col, const SplitPlan& split) {
    PairSide s;
    s.train = subset(col, split.trainIdx);
    s.holdout = subset(col, split.holdoutIdx);
    s.bandwidth = pluginBandwidth(s.train);
    return s;
}

// ACE-style power iteration on the two smoothers, then held-out correlation.
double fccaPairCorrelation(const PairSide& x, const PairSide& y, const MarginalOptions& opts) {
    Smoother sx = buildSmoother(x.train, x.bandwidth);
    Smoother sy = buildSmoother(y.train, y.bandwidth);
    Vector g = y.train.array() - y.train.mean();
    double ng = rmsNorm(g);
    if (ng < 1e-14) return 0;
    g /= ng;
    Vector f;
    double prev = -2;
    for (int it = 0; it < opts.maxIter; ++it) {
        f = sx.s * g;
        f.array() -= f.mean();
        double nf = rmsNorm(f);
        if (nf < 1e-14) return 0;
        f /= nf;
        g = sy.s * f;
        g.array() -= g.mean();
        ng = rmsNorm(g);
        if (ng < 1e-14) return 0;
        g /= ng;
        const double rho = f.dot(g) / static_cast<double>(f.size());
        if (std::abs(rho - prev) < opts.tol) break;
        prev = rho;
    }
    Vector fH = extendFit(x.train, f, x.holdout);
    Vector gH = extendFit(y.train, g, y.holdout);
    return pearson(fH, gH);
}

// Two-block regularized kernel CCA on the pair, via the generalized
// eigenproblem in the Gram eigenbases.
double kccaPairCorrelation(const PairSide& x, const PairSide& y, const MarginalOptions& opts) {
    const int n = static_cast<int>(x.train.size());
    Gram gx = buildGram(x.train, x.bandwidth);
    Gram gy = buildGram(y.train, y.bandwidth);
    GramBasis bx = gramBasis(gx);
    GramBasis by = gramBasis(gy);
    const int dx = static_cast<int>(bx.d.size());
    const int dy = static_cast<int>(by.d.size());
    if (dx == 0 || dy == 0) return 0;

    Matrix a = Matrix::Zero(dx + dy, dx + dy);
    a.topRightCorner(dx, dy) = bx.b.transpose() * by.b / static_cast<double>(n);
    a.bottomLeftCorner(dy, dx) = a.topRightCorner(dx, dy).transpose();
    Matrix b = Matrix::Zero(dx + dy, dx + dy);
    for (int i = 0; i < dx; ++i) b(i, i) = 1.0 / n + opts.gamma / bx.d[i];
    for (int i = 0; i < dy; ++i) b(dx + i, dx + i) = 1.0 / n + opts.gamma / by.d[i];

    GenEigResult eig = topGenEig(a, b);
    Vector zx = eig.vector.head(dx);
    Vector zy = eig.vector.tail(dy);
    Vector alphaX = bx.b * (zx.array() / bx.d.array()).matrix();
    Vector alphaY = by.b * (zy.array() / by.d.array()).matrix();

    const long m = x.holdout.size();
    Vector fH(m), gH(m);
    for (long i = 0; i < m; ++i) {
        fH[i] = centeredKernelVector(gx, x.holdout[i]).dot(alphaX);
        gH[i] = centeredKernelVector(gy, y.holdout[i]).dot(alphaY);
    }
    return pearson(fH, gH);
}

bool lexLess(const Vector& a, const Vector& b) {
    for (long i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return a.size() < b.size();
}

}  // namespace

double marginalPairFit(const Vector& xCol, const Vector& yCol, MarginalMethod method,
                       const SplitPlan& split, const MarginalOptions& opts) {
    try {
        PairSide x = makePairSide(xCol, split);
        PairSide y = makePairSide(yCol, split);
        if (method == MarginalMethod::fccaPairwise) return fccaPairCorrelation(x, y, opts);
        // The kernel route is symmetric in its two arguments; evaluate in a
        // canonical order so swapping the datasets transposes M exactly.
        if (lexLess(yCol, xCol)) return kccaPairCorrelation(y, x, opts);
        return kccaPairCorrelation(x, y, opts);
    } catch (const Error&) {
        return 0;
    }
}

MarginalMatrix buildMarginalMatrix(const PairedDataset& data, MarginalMethod method,
                                   std::uint64_t seed, int workers,
                                   const MarginalOptions& opts) {
    MarginalMatrix out;
    out.method = method;
    out.split = splitHalf(data.n(), seed);
    const int p1 = data.p1(), p2 = data.p2();
    out.m.resize(p1, p2);
    std::atomic<int> failures{0};

    if (method == MarginalMethod::fccaPairwise) {
        // Per-covariate train smoothers are shared across all pairs.
        std::vector<PairSide> xs(p1), ys(p2);
        std::vector<Smoother> sx(p1), sy(p2);
        parallelFor(p1, workers, [&](int j) {
            xs[j] = makePairSide(data.x.col(j), out.split);
            sx[j] = buildSmoother(xs[j].train, xs[j].bandwidth);
        });
        parallelFor(p2, workers, [&](int k) {
            ys[k] = makePairSide(data.y.col(k), out.split);
            sy[k] = buildSmoother(ys[k].train, ys[k].bandwidth);
        });
        parallelFor(p1 * p2, workers, [&](int idx) {
            const int j = idx / p2, k = idx % p2;
            try {
                Vector g = ys[k].train.array() - ys[k].train.mean();
                double ng = rmsNorm(g);
                if (ng < 1e-14) {
                    out.m(j, k) = 0;
                    return;
                }
                g /= ng;
                Vector f;
                double prev = -2;
                for (int it = 0; it < opts.maxIter; ++it) {
                    f = sx[j].s * g;
                    f.array() -= f.mean();
                    double nf = rmsNorm(f);
                    if (nf < 1e-14) {
                        out.m(j, k) = 0;
                        return;
                    }
                    f /= nf;
                    g = sy[k].s * f;
                    g.array() -= g.mean();
                    ng = rmsNorm(g);
                    if (ng < 1e-14) {
                        out.m(j, k) = 0;
                        return;
                    }
                    g /= ng;
                    const double rho = f.dot(g) / static_cast<double>(f.size());
                    if (std::abs(rho - prev) < opts.tol) break;
                    prev = rho;
                }
                Vector fH = extendFit(xs[j].train, f, xs[j].holdout);
                Vector gH = extendFit(ys[k].train, g, ys[k].holdout);
                out.m(j, k) = pearson(fH, gH);
            } catch (const Error&) {
                out.m(j, k) = 0;
                failures.fetch_add(1);
            }
        });
    } else {
        struct KSide {
            PairSide side;
            Gram gram;
            GramBasis basis;
        };
        std::vector<KSide> xs(p1), ys(p2);
        parallelFor(p1, workers, [&](int j) {
            xs[j].side = makePairSide(data.x.col(j), out.split);
            xs[j].gram = buildGram(xs[j].side.train, xs[j].side.bandwidth);
            xs[j].basis = gramBasis(xs[j].gram);
        });
        parallelFor(p2, workers, [&](int k) {
            ys[k].side = makePairSide(data.y.col(k), out.split);
            ys[k].gram = buildGram(ys[k].side.train, ys[k].side.bandwidth);
            ys[k].basis = gramBasis(ys[k].gram);
        });
        const int n = static_cast<int>(out.split.trainIdx.size());
        auto corrOf = [&](const KSide& a, const KSide& b2) -> double {
            const int dx = static_cast<int>(a.basis.d.size());
            const int dy = static_cast<int>(b2.basis.d.size());
            if (dx == 0 || dy == 0) return 0;
            Matrix am = Matrix::Zero(dx + dy, dx + dy);
            am.topRightCorner(dx, dy) =
                a.basis.b.transpose() * b2.basis.b / static_cast<double>(n);
            am.bottomLeftCorner(dy, dx) = am.topRightCorner(dx, dy).transpose();
            Matrix bm = Matrix::Zero(dx + dy, dx + dy);
            for (int i = 0; i < dx; ++i) bm(i, i) = 1.0 / n + opts.gamma / a.basis.d[i];
            for (int i = 0; i < dy; ++i)
                bm(dx + i, dx + i) = 1.0 / n + opts.gamma / b2.basis.d[i];
            GenEigResult eig = topGenEig(am, bm);
            Vector alphaA =
                a.basis.b * (eig.vector.head(dx).array() / a.basis.d.array()).matrix();
            Vector alphaB =
                b2.basis.b * (eig.vector.tail(dy).array() / b2.basis.d.array()).matrix();
            const long m = a.side.holdout.size();
            Vector fH(m), gH(m);
            for (long i = 0; i < m; ++i) {
                fH[i] = centeredKernelVector(a.gram, a.side.holdout[i]).dot(alphaA);
                gH[i] = centeredKernelVector(b2.gram, b2.side.holdout[i]).dot(alphaB);
            }
            return pearson(fH, gH);
        };
        parallelFor(p1 * p2, workers, [&](int idx) {
            const int j = idx / p2, k = idx % p2;
            try {
                if (lexLess(data.y.col(k), data.x.col(j)))
                    out.m(j, k) = corrOf(ys[k], xs[j]);
                else
                    out.m(j, k) = corrOf(xs[j], ys[k]);
            } catch (const Error&) {
                out.m(j, k) = 0;
                failures.fetch_add(1);
            }
        });
    }
    out.failedPairs = failures.load();
    return out;
}

ScreeningResult thresholdMarginals(const MarginalMatrix& m, const ThresholdRule& rule) {
    ScreeningResult res;
    const int p1 = static_cast<int>(m.m.rows());
    const int p2 = static_cast<int>(m.m.cols());
    if (rule.kind == ThresholdRule::Kind::topK) {
        if (rule.k > 0) {
            std::vector<std::pair<int, int>> all;
            all.reserve(static_cast<size_t>(p1) * p2);
            for (int j = 0; j < p1; ++j)
                for (int k = 0; k < p2; ++k) all.emplace_back(j, k);
            std::stable_sort(all.begin(), all.end(), [&](auto a, auto b) {
                const double va = m.m(a.first, a.second), vb = m.m(b.first, b.second);
                if (va != vb) return va > vb;
                return a < b;
            });
            const int limit = std::min<int>(rule.k, static_cast<int>(all.size()));
            const double cutoff = m.m(all[limit - 1].first, all[limit - 1].second);
            for (auto& e : all) {
                if (m.m(e.first, e.second) >= cutoff)
                    res.keptEntries.push_back(e);
                else
                    break;
            }
            res.threshold = cutoff;
        }
    } else {
        const double eps = rule.epsilon;
        for (int j = 0; j < p1; ++j)
            for (int k = 0; k < p2; ++k)
                if (m.m(j, k) > eps) res.keptEntries.emplace_back(j, k);
        res.threshold = eps;
        res.epsilon = eps;
    }
    std::vector<char> inX(p1, 0), inY(p2, 0);
    for (auto& e : res.keptEntries) {
        inX[e.first] = 1;
        inY[e.second] = 1;
    }
    for (int j = 0; j < p1; ++j)
        if (inX[j]) res.selectedX.push_back(j);
    for (int k = 0; k < p2; ++k)
        if (inY[k]) res.selectedY.push_back(k);
    return res;
}

double theoryEpsilon(int n, int p1, int p2, double delta, double c1OrZeta, double c2OrC,
                     EpsilonForm form) {
    if (!(delta > 0 && delta < 1)) throw InvalidDelta();
    const double logTerm =
        std::log(static_cast<double>(p1) * static_cast<double>(p2) / delta);
    const double tail = c2OrC * std::sqrt(std::max(logTerm, 0.0) / n);
    if (form == EpsilonForm::sobolev) return c1OrZeta / std::sqrt(static_cast<double>(n)) + tail;
    return c1OrZeta + tail;
}

double calibrateEpsilon(const PairedDataset& data, MarginalMethod method, double delta,
                        int nPerms, std::uint64_t seed, int workers,
                        const MarginalOptions& opts) {
    if (!(delta > 0 && delta < 1)) throw InvalidDelta();
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<double> maxima;
    maxima.reserve(nPerms);
    for (int b = 0; b < nPerms; ++b) {
        IndexList perm(data.n());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        PairedDataset permuted = data;
        permuted.y = selectRows(data.y, perm);
        MarginalMatrix m = buildMarginalMatrix(permuted, method, seed, workers, opts);
        maxima.push_back(m.m.maxCoeff());
    }
    std::sort(maxima.begin(), maxima.end());
    int idx = static_cast<int>(std::ceil((1.0 - delta) * (nPerms + 1))) - 1;
    idx = std::clamp(idx, 0, nPerms - 1);
    return maxima[idx];
}

double estimateZeta(const GramSet& x, const GramSet& y) {
    auto rawDiag = [](const Gram& g) {
        Vector d = g.k.diagonal();
        d += 2.0 * g.rawRowMean;
        d.array() -= g.rawGrandMean;
        return d;
    };
    double best = 0;
    for (const Gram& gx : x.grams) {
        Vector dx = rawDiag(gx);
        for (const Gram& gy : y.grams) {
            Vector dy = rawDiag(gy);
            const double v = 2.0 / dx.size() * std::sqrt(dx.cwiseProduct(dy).sum());
            best = std::max(best, v);
        }
    }
    return best;
}

SparseInitFcca buildFccaInit(const PairedDataset& data, const ScreeningResult& selected,
                             int workers) {
    if (selected.selectedX.empty() || selected.selectedY.empty()) throw EmptySelection();
    PairedDataset sub = data;
    sub.x = selectColumns(data.x, selected.selectedX);
    sub.y = selectColumns(data.y, selected.selectedY);
    FccaModel m = fitNonsparseFcca(sub, FccaHyper{}, nullptr, workers);
    SparseInitFcca init;
    init.f = zeroFit(data.p1(), data.n());
    init.g = zeroFit(data.p2(), data.n());
    for (size_t i = 0; i < selected.selectedX.size(); ++i)
        init.f.values.row(selected.selectedX[i]) = m.f.values.row(static_cast<long>(i));
    for (size_t i = 0; i < selected.selectedY.size(); ++i)
        init.g.values.row(selected.selectedY[i]) = m.g.values.row(static_cast<long>(i));
    init.f.recompute();
    init.g.recompute();
    return init;
}

SparseInitKcca buildKccaInit(const PairedDataset& data, const ScreeningResult& selected,
                             double gammaF, double gammaG, KernelType kernel, int workers) {
    if (selected.selectedX.empty() || selected.selectedY.empty()) throw EmptySelection();
    Matrix xs = selectColumns(data.x, selected.selectedX);
    Matrix ys = selectColumns(data.y, selected.selectedY);
    std::vector<double> bwX, bwY;
    if (kernel == KernelType::gaussian) {
        bwX = pluginBandwidths(xs);
        bwY = pluginBandwidths(ys);
    } else {
        bwX.assign(xs.cols(), 1.0);
        bwY.assign(ys.cols(), 1.0);
    }
    KccaSide sx = makeKccaSide(buildGramSet(xs, bwX, kernel, workers));
    KccaSide sy = makeKccaSide(buildGramSet(ys, bwY, kernel, workers));
    SparseInitKcca init;
    init.coeffs = nonsparseAdditiveKcca(sx, sy, gammaF, gammaG);
    init.selectedX = selected.selectedX;
    init.selectedY = selected.selectedY;
    return init;
}

void writeMarginalTsv(const MarginalMatrix& m, const std::string& path,
                      const std::string& headerComment) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write " + path);
    if (!headerComment.empty()) out << "# " << headerComment << "\n";
    char buf[64];
    for (int j = 0; j < m.m.rows(); ++j) {
        for (int k = 0; k < m.m.cols(); ++k) {
            std::snprintf(buf, sizeof(buf), "%.10g", m.m(j, k));
            out << buf << (k + 1 == m.m.cols() ? '\n' : '\t');
        }
    }
}

}  // namespace sacca
