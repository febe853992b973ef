#include "sacca/bench.hpp"

#include "sacca/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace sacca {

ScenarioName scenarioFromString(const std::string& name) {
    if (name == "square") return ScenarioName::square;
    if (name == "abs") return ScenarioName::abs;
    if (name == "cos" || name == "cosine") return ScenarioName::cosine;
    if (name == "logsin") return ScenarioName::logsin;
    if (name == "linear") return ScenarioName::linear;
    if (name == "table1") return ScenarioName::table1;
    if (name == "table2") return ScenarioName::table2;
    if (name == "null" || name == "nullNoise") return ScenarioName::nullNoise;
    throw ConfigError("unknown scenario: " + name);
}

std::string scenarioToString(ScenarioName name) {
    switch (name) {
        case ScenarioName::square: return "square";
        case ScenarioName::abs: return "abs";
        case ScenarioName::cosine: return "cos";
        case ScenarioName::logsin: return "logsin";
        case ScenarioName::linear: return "linear";
        case ScenarioName::table1: return "table1";
        case ScenarioName::table2: return "table2";
        case ScenarioName::nullNoise: return "null";
    }
    return "?";
}

Scenario defaultScenario(ScenarioName name) {
    Scenario s;
    s.name = name;
    switch (name) {
        case ScenarioName::table1:
            s.n = 75;
            s.p1 = s.p2 = 10;
            break;
        case ScenarioName::table2:
            s.n = 150;
            s.p1 = s.p2 = 150;
            s.xDistribution = XDistribution::uniform;
            break;
        default:
            s.n = 150;
            s.p1 = s.p2 = 15;
            break;
    }
    return s;
}

BenchMethod benchMethodFromString(const std::string& name) {
    if (name == "fcca") return BenchMethod::fcca;
    if (name == "kcca") return BenchMethod::kcca;
    if (name == "scca") return BenchMethod::scca;
    if (name == "linear") return BenchMethod::linear;
    if (name == "kcca-full") return BenchMethod::kccaFull;
    throw ConfigError("unknown method: " + name);
}

std::string benchMethodToString(BenchMethod m) {
    switch (m) {
        case BenchMethod::fcca: return "fcca";
        case BenchMethod::kcca: return "kcca";
        case BenchMethod::scca: return "scca";
        case BenchMethod::linear: return "linear";
        case BenchMethod::kccaFull: return "kcca-full";
    }
    return "?";
}

namespace {

Matrix drawMatrix(int n, int p, XDistribution dist, std::mt19937_64& rng) {
    Matrix m(n, p);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i)
            m(i, j) = dist == XDistribution::normal ? gauss(rng) : unif(rng);
    return m;
}

Vector standardizedCopy(const Vector& v) {
    const double n = static_cast<double>(v.size());
    Vector c = v.array() - v.mean();
    const double sd = std::sqrt(c.squaredNorm() / n);
    if (sd <= 1e-12) throw ConstantColumn(0);
    return c / sd;
}

double figure1Link(ScenarioName name, double x) {
    switch (name) {
        case ScenarioName::square:
        case ScenarioName::table1: return x * x;
        case ScenarioName::abs: return std::abs(x);
        case ScenarioName::cosine: return std::cos(x);
        case ScenarioName::logsin: return std::exp(std::sin(x));
        case ScenarioName::linear: return x;
        default: return x;
    }
}

}  // namespace

GeneratedData generateScenario(const Scenario& s) {
    std::mt19937_64 rng(s.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    GeneratedData out;

    Matrix x = drawMatrix(s.n, s.p1, s.xDistribution, rng);
    Matrix y = drawMatrix(s.n, s.p2, XDistribution::normal, rng);

    switch (s.name) {
        case ScenarioName::nullNoise:
            break;
        case ScenarioName::table2: {
            const int nRel = 4;
            if (s.p1 < nRel || s.p2 < nRel)
                throw ConfigError("table2 needs at least 4 columns per view");
            std::vector<Vector> f(nRel);
            for (int i = 0; i < nRel; ++i) {
                Vector xi = standardizedCopy(x.col(i));
                Vector fi(s.n);
                for (int r = 0; r < s.n; ++r)
                    fi[r] = (i % 2 == 0) ? std::cos(M_PI / 2.0 * xi[r]) : xi[r] * xi[r];
                f[i] = standardizedCopy(fi);
            }
            for (int j = 0; j < nRel; ++j) {
                Vector yj = Vector::Zero(s.n);
                for (int i = 0; i < nRel; ++i)
                    if (i != j) yj += f[i];
                for (int r = 0; r < s.n; ++r) yj[r] += s.noiseSd * gauss(rng);
                y.col(j) = yj;
            }
            out.relevantX = {0, 1, 2, 3};
            out.relevantY = {0, 1, 2, 3};
            break;
        }
        default: {
            for (int r = 0; r < s.n; ++r)
                y(r, 0) = figure1Link(s.name, x(r, 0)) + s.noiseSd * gauss(rng);
            out.relevantX = {0};
            out.relevantY = {0};
            break;
        }
    }
    out.data = makeDataset(std::move(x), std::move(y));
    return out;
}

SupportScore scoreSupport(const IndexList& selX, const IndexList& selY,
                          const IndexList& relX, const IndexList& relY) {
    std::set<int> sel, rel;
    for (int i : selX) sel.insert(i);
    for (int j : selY) sel.insert(j + (1 << 24));
    for (int i : relX) rel.insert(i);
    for (int j : relY) rel.insert(j + (1 << 24));
    int hit = 0;
    for (int v : sel)
        if (rel.count(v)) ++hit;
    SupportScore score;
    if (sel.empty())
        score.precision = rel.empty() ? 1.0 : 0.0;
    else
        score.precision = static_cast<double>(hit) / sel.size();
    score.recall = rel.empty() ? 1.0 : static_cast<double>(hit) / rel.size();
    return score;
}

namespace {

// Support for scoring: the l1 budget holds with equality, so the solvers can
// leave a sliver of residual mass (norms well under a tenth of the leading one) on extra
// covariates; count only components that carry a meaningful share.
IndexList significantSupport(const Vector& norms) {
    const double cutoff = std::max(1e-6, 0.1 * norms.maxCoeff());
    IndexList out;
    for (int j = 0; j < norms.size(); ++j)
        if (norms[j] > cutoff) out.push_back(j);
    return out;
}

IndexList mapBack(const IndexList& local, const IndexList& selected) {
    IndexList out;
    out.reserve(local.size());
    for (int i : local) out.push_back(selected[i]);
    return out;
}

bool containsAll(const IndexList& haystack, const IndexList& needles) {
    for (int v : needles)
        if (std::find(haystack.begin(), haystack.end(), v) == haystack.end()) return false;
    return true;
}

struct FitOutcome {
    double testCorrelation = 0;
    IndexList supportX, supportY;
    bool hasSupport = true;
    bool converged = true;
    double chosenC = 0, chosenGamma = 0;
};

FitOutcome runAdditive(const PairedDataset& train, const PairedDataset& eval,
                       const GeneratedData& gd, const Pipeline& pipe,
                       std::uint64_t seed, bool* screenedAll) {
    FitOutcome out;
    IndexList selX(train.p1()), selY(train.p2());
    for (int i = 0; i < train.p1(); ++i) selX[i] = i;
    for (int j = 0; j < train.p2(); ++j) selY[j] = j;
    PairedDataset red = train;
    PairedDataset redEval = eval;

    if (pipe.screen) {
        const MarginalMethod mm = pipe.method == BenchMethod::fcca
                                      ? MarginalMethod::fccaPairwise
                                      : MarginalMethod::kccaPairwise;
        MarginalMatrix mm2 = buildMarginalMatrix(train, mm, seed ^ 0xa24baed4963ee407ull,
                                                 pipe.workers);
        ScreeningResult sel = thresholdMarginals(mm2, *pipe.screen);
        if (sel.selectedX.empty() || sel.selectedY.empty()) throw EmptySelection();
        selX = sel.selectedX;
        selY = sel.selectedY;
        if (screenedAll)
            *screenedAll = containsAll(selX, gd.relevantX) && containsAll(selY, gd.relevantY);
        red.x = selectColumns(train.x, selX);
        red.y = selectColumns(train.y, selY);
        redEval.x = selectColumns(eval.x, selX);
        redEval.y = selectColumns(eval.y, selY);
    } else if (screenedAll) {
        *screenedAll = true;
    }

    double c = pipe.cf;
    double gamma = pipe.gamma;

    if (pipe.method == BenchMethod::fcca) {
        AdditiveFit init =
            pipe.init == InitKind::random
                ? randomInit(red.p2(), red.n(), seed ^ 0x6c62272e07bb0142ull)
                : [&] {
                      FccaModel ns = fitNonsparseFcca(red, FccaHyper{}, nullptr, pipe.workers);
                      return ns.g;
                  }();
        if (pipe.tune) {
            TuneGrid grid = pipe.tuneGrid ? *pipe.tuneGrid : defaultGrid(red.p1(), red.p2());
            grid.seed = seed;
            TuneInputs in;
            in.data = &red;
            in.fccaInit = &init;
            TuneReport rep = permutationTune(in, SolverMethod::fcca, grid, pipe.workers);
            c = rep.best().c;
        }
        FccaHyper hyper;
        hyper.cf = hyper.cg = c;
        FccaModel model = fitFcca(red, hyper, init, pipe.workers);
        out.converged = model.converged;
        out.testCorrelation = evaluateFit(model, redEval).correlation;
        out.supportX = mapBack(significantSupport(model.f.groupNorms), selX);
        out.supportY = mapBack(significantSupport(model.g.groupNorms), selY);
    } else {
        KccaSide sideX = makeKccaSide(buildGramSet(red.x, pluginBandwidths(red.x),
                                                   KernelType::gaussian, pipe.workers));
        KccaSide sideY = makeKccaSide(buildGramSet(red.y, pluginBandwidths(red.y),
                                                   KernelType::gaussian, pipe.workers));
        KccaCoefficients init = nonsparseAdditiveKcca(sideX, sideY, gamma, gamma);
        if (pipe.tune) {
            TuneGrid grid = pipe.tuneGrid ? *pipe.tuneGrid : defaultGrid(red.p1(), red.p2());
            grid.seed = seed;
            TuneInputs in;
            in.data = &red;
            in.kccaInit = &init;
            in.sideX = &sideX;
            in.sideY = &sideY;
            TuneReport rep = permutationTune(in, SolverMethod::kcca, grid, pipe.workers);
            c = rep.best().c;
            gamma = rep.best().gamma;
            init = nonsparseAdditiveKcca(sideX, sideY, gamma, gamma);
        }
        KccaHyper hyper;
        hyper.cf = hyper.cg = c;
        hyper.gammaF = hyper.gammaG = gamma;
        KccaModel model = fitSaKccaOnSides(sideX, sideY, hyper, &init);
        out.converged = model.converged;
        out.testCorrelation = evaluateKcca(model, redEval).correlation;
        out.supportX = mapBack(significantSupport(model.fNorms), selX);
        out.supportY = mapBack(significantSupport(model.gNorms), selY);
    }
    out.chosenC = c;
    out.chosenGamma = gamma;
    return out;
}

IndexList denseSupport(const Vector& w, double tol = 1e-6) {
    IndexList out;
    for (int i = 0; i < w.size(); ++i)
        if (std::abs(w[i]) > tol) out.push_back(i);
    return out;
}

}  // namespace

RepeatRecord runRepeat(const Scenario& s, const Pipeline& pipe, std::uint64_t seed) {
    RepeatRecord rec;
    rec.seed = seed;
    try {
        Scenario train = s;
        train.seed = seed;
        GeneratedData gd = generateScenario(train);

        Scenario evalScenario = s;
        evalScenario.n = pipe.evalSamples;
        evalScenario.seed = seed ^ 0x9e3779b97f4a7c15ull;
        GeneratedData ge = generateScenario(evalScenario);

        PairedDataset std = standardize(gd.data);
        PairedDataset eval = applyPreprocess(std.prep, ge.data.x, ge.data.y);

        switch (pipe.method) {
            case BenchMethod::fcca:
            case BenchMethod::kcca: {
                bool screenedAll = false;
                FitOutcome fit = runAdditive(std, eval, gd, pipe, seed, &screenedAll);
                rec.testCorrelation = fit.testCorrelation;
                rec.converged = fit.converged;
                rec.chosenC = fit.chosenC;
                rec.chosenGamma = fit.chosenGamma;
                rec.screenedAllRelevant = screenedAll;
                SupportScore sc =
                    scoreSupport(fit.supportX, fit.supportY, gd.relevantX, gd.relevantY);
                rec.precision = sc.precision;
                rec.recall = sc.recall;
                break;
            }
            case BenchMethod::scca: {
                LinearCcaSolution sol = sparseLinearCca(std, pipe.cf, pipe.cg);
                rec.testCorrelation = evaluateLinear(sol, eval).correlation;
                SupportScore sc = scoreSupport(denseSupport(sol.u), denseSupport(sol.v),
                                               gd.relevantX, gd.relevantY);
                rec.precision = sc.precision;
                rec.recall = sc.recall;
                rec.chosenC = pipe.cf;
                break;
            }
            case BenchMethod::linear: {
                LinearCcaSolution sol = linearCca(std);
                rec.testCorrelation = evaluateLinear(sol, eval).correlation;
                SupportScore sc = scoreSupport(denseSupport(sol.u), denseSupport(sol.v),
                                               gd.relevantX, gd.relevantY);
                rec.precision = sc.precision;
                rec.recall = sc.recall;
                break;
            }
            case BenchMethod::kccaFull: {
                FullKccaModel model = fullKcca(std, pipe.gamma);
                rec.testCorrelation = evaluateFullKcca(model, eval).correlation;
                rec.hasSupport = false;
                rec.chosenGamma = pipe.gamma;
                break;
            }
        }
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

BenchMetrics runExperiment(const Scenario& s, const Pipeline& pipe, int repeats) {
    BenchMetrics metrics;
    metrics.perRepeat.resize(repeats);
    std::vector<std::uint64_t> seeds(repeats);
    for (int r = 0; r < repeats; ++r)
        seeds[r] = s.seed ^ (0x100000001b3ull * static_cast<std::uint64_t>(r + 1));

    const bool outerParallel = pipe.workers > 1 && repeats > 1;
    Pipeline inner = pipe;
    if (outerParallel) inner.workers = 1;
    parallelFor(repeats, outerParallel ? pipe.workers : 1, [&](int r) {
        metrics.perRepeat[r] = runRepeat(s, inner, seeds[r]);
    });

    metrics.repeats = repeats;
    double corrSum = 0, precSum = 0, recSum = 0;
    int okCount = 0, supCount = 0;
    for (const RepeatRecord& rec : metrics.perRepeat) {
        if (!rec.ok) {
            ++metrics.failures;
            continue;
        }
        ++okCount;
        corrSum += rec.testCorrelation;
        if (rec.hasSupport) {
            ++supCount;
            precSum += rec.precision;
            recSum += rec.recall;
        }
    }
    if (okCount > 0) metrics.testCorrelation = corrSum / okCount;
    if (supCount > 0) {
        metrics.precision = precSum / supCount;
        metrics.recall = recSum / supCount;
    }
    return metrics;
}

std::vector<PathRow> regularizationPath(const PairedDataset& data, SolverMethod method,
                                        const std::vector<double>& cValues,
                                        const IndexList& relevantX,
                                        const IndexList& relevantY, double gamma,
                                        int workers) {
    if (cValues.empty()) throw ConfigError("empty budget grid");
    if (!std::is_sorted(cValues.begin(), cValues.end()))
        throw ConfigError("budget grid must be increasing");

    auto isRel = [](const IndexList& rel, int idx) {
        return std::find(rel.begin(), rel.end(), idx) != rel.end();
    };
    std::vector<PathRow> rows;
    auto emit = [&](double c, const Vector& fNorms, const Vector& gNorms) {
        for (int j = 0; j < fNorms.size(); ++j)
            rows.push_back({c, 0, j, fNorms[j], isRel(relevantX, j)});
        for (int k = 0; k < gNorms.size(); ++k)
            rows.push_back({c, 1, k, gNorms[k], isRel(relevantY, k)});
    };

    if (method == SolverMethod::fcca) {
        FccaModel nonsparse = fitNonsparseFcca(data, FccaHyper{}, nullptr, workers);
        AdditiveFit init = nonsparse.g;
        for (double c : cValues) {
            FccaHyper hyper;
            hyper.cf = hyper.cg = c;
            FccaModel model = fitFcca(data, hyper, init, workers);
            emit(c, model.f.groupNorms, model.g.groupNorms);
            if (!model.g.isZero()) init = model.g;
        }
    } else {
        KccaSide sideX = makeKccaSide(buildGramSet(data.x, pluginBandwidths(data.x),
                                                   KernelType::gaussian, workers));
        KccaSide sideY = makeKccaSide(buildGramSet(data.y, pluginBandwidths(data.y),
                                                   KernelType::gaussian, workers));
        KccaCoefficients init = nonsparseAdditiveKcca(sideX, sideY, gamma, gamma);
        for (double c : cValues) {
            KccaHyper hyper;
            hyper.cf = hyper.cg = c;
            hyper.gammaF = hyper.gammaG = gamma;
            KccaModel model = fitSaKccaOnSides(sideX, sideY, hyper, &init);
            emit(c, model.fNorms, model.gNorms);
            if (model.coeffs.zx.norm() > 1e-12 && model.coeffs.zy.norm() > 1e-12)
                init = model.coeffs;
        }
    }
    return rows;
}

}  // namespace sacca
