#include "sacca/bench.hpp"
#include "sacca/io.hpp"
#include "sacca/parallel.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace sacca;

namespace {

struct ScreenRule {
    std::string kind = "none";  // none | topk | fixed | theory | calibrated
    int k = 0;
    double value = 0;  // epsilon or delta
};

ScreenRule parseRule(const std::string& text) {
    ScreenRule rule;
    if (text.empty() || text == "none") return rule;
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ConfigError("screen rule must look like topk:K, fixed:EPS, theory:DELTA, "
                          "or calibrated:DELTA");
    rule.kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    try {
        if (rule.kind == "topk")
            rule.k = std::stoi(arg);
        else if (rule.kind == "fixed" || rule.kind == "theory" || rule.kind == "calibrated")
            rule.value = std::stod(arg);
        else
            throw ConfigError("unknown screen rule kind: " + rule.kind);
    } catch (const std::logic_error&) {
        throw ConfigError("bad screen rule argument: " + arg);
    }
    return rule;
}

std::vector<double> parseGrid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::logic_error&) {
            throw ConfigError("bad grid value: " + item);
        }
    }
    return out;
}

IndexList parseIndexList(const std::string& text) {
    IndexList out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::logic_error&) {
            throw ConfigError("bad index: " + item);
        }
    }
    return out;
}

void emitGnuplot(const std::string& tsvPath, const std::string& plotLine) {
    std::ofstream out(tsvPath + ".gp", std::ios::binary);
    out << "set datafile commentschars '#'\n";
    out << "set datafile separator '\\t'\n";
    out << plotLine << "\n";
}

// Common per-command state.
struct Common {
    std::string outDir = ".";
    std::uint64_t seed = 0;
    int workers = 0;
    bool gnuplot = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--out", outDir, "output directory");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--workers", workers, "worker threads (0 = auto)");
        cmd->add_flag("--emit-gnuplot", gnuplot, "write companion gnuplot scripts");
    }
    int resolvedWorkers() const { return workers > 0 ? workers : defaultWorkerCount(); }
    std::string path(const std::string& name) const {
        fs::create_directories(outDir);
        return (fs::path(outDir) / name).string();
    }
};

PairedDataset loadAndPrep(const std::string& xPath, const std::string& yPath,
                          bool standardizeData, bool winsorizeData) {
    PairedDataset data = loadCsvPair(xPath, yPath);
    if (winsorizeData) data = winsorize(data);
    if (standardizeData) data = standardize(data);
    return data;
}

ScreeningResult runScreen(const PairedDataset& data, MarginalMethod mm,
                          const ScreenRule& rule, std::uint64_t seed, int workers,
                          MarginalMatrix* matrixOut) {
    MarginalMatrix m = buildMarginalMatrix(data, mm, seed, workers);
    ThresholdRule tr;
    if (rule.kind == "topk") {
        tr.kind = ThresholdRule::Kind::topK;
        tr.k = rule.k;
    } else if (rule.kind == "fixed") {
        tr.kind = ThresholdRule::Kind::fixed;
        tr.epsilon = rule.value;
    } else if (rule.kind == "theory") {
        tr.kind = ThresholdRule::Kind::theory;
        tr.epsilon = theoryEpsilon(data.n(), data.p1(), data.p2(), rule.value, 0.25, 1.0);
    } else if (rule.kind == "calibrated") {
        tr.kind = ThresholdRule::Kind::theory;
        tr.epsilon = calibrateEpsilon(data, mm, rule.value, 40, seed ^ 0xc2b2ae3d27d4eb4full,
                                      workers);
    } else {
        throw ConfigError("unknown screen rule kind: " + rule.kind);
    }
    if (matrixOut) *matrixOut = m;
    return thresholdMarginals(m, tr);
}

std::string joinIndices(const IndexList& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s.empty() ? "-" : s;
}

int cmdFit(const Common& common, const std::string& method, const std::string& xPath,
           const std::string& yPath, double cf, double cg, double gamma,
           const std::string& bandwidth, const ScreenRule& screen, bool tune, int perms,
           bool noStandardize, bool doWinsorize) {
    std::ostringstream canon;
    canon << "fit method=" << method << " x=" << xPath << " y=" << yPath << " cf=" << cf
          << " cg=" << cg << " gamma=" << gamma << " bw=" << bandwidth
          << " screen=" << screen.kind << ":" << screen.k << ":" << screen.value
          << " tune=" << tune << " perms=" << perms << " std=" << !noStandardize
          << " winsor=" << doWinsorize << " seed=" << common.seed;
    const std::string hash = configHash(canon.str());

    PairedDataset data = loadAndPrep(xPath, yPath, !noStandardize, doWinsorize);
    const bool additive = method == "fcca" || method == "kcca";
    if (screen.kind != "none" && !additive)
        throw ConfigError("screening applies to the additive methods only");
    if (tune && !additive) throw ConfigError("tuning applies to the additive methods only");

    double bwOverride = 0;
    if (bandwidth != "auto") {
        try {
            bwOverride = std::stod(bandwidth);
        } catch (const std::logic_error&) {
            throw ConfigError("bandwidth must be 'auto' or a number");
        }
        if (bwOverride <= 0) throw ConfigError("bandwidth must be positive");
    }

    IndexList selX(data.p1()), selY(data.p2());
    for (int i = 0; i < data.p1(); ++i) selX[i] = i;
    for (int j = 0; j < data.p2(); ++j) selY[j] = j;
    PairedDataset red = data;
    if (screen.kind != "none") {
        MarginalMethod mm = method == "fcca" ? MarginalMethod::fccaPairwise
                                             : MarginalMethod::kccaPairwise;
        ScreeningResult sel =
            runScreen(data, mm, screen, common.seed, common.resolvedWorkers(), nullptr);
        if (sel.selectedX.empty() || sel.selectedY.empty()) throw EmptySelection();
        selX = sel.selectedX;
        selY = sel.selectedY;
        red.x = selectColumns(data.x, selX);
        red.y = selectColumns(data.y, selY);
    }

    ModelArtifact artifact;
    bool converged = true;
    if (method == "fcca") {
        FccaHyper hyper;
        hyper.cf = cf;
        hyper.cg = cg;
        if (bwOverride > 0) {
            hyper.bwX.assign(red.p1(), bwOverride);
            hyper.bwY.assign(red.p2(), bwOverride);
        }
        FccaModel ns = fitNonsparseFcca(red, hyper, nullptr, common.resolvedWorkers());
        if (tune) {
            TuneGrid grid = defaultGrid(red.p1(), red.p2());
            grid.nPerms = perms;
            grid.seed = common.seed;
            TuneInputs in;
            in.data = &red;
            in.fccaInit = &ns.g;
            TuneReport rep =
                permutationTune(in, SolverMethod::fcca, grid, common.resolvedWorkers());
            hyper.cf = hyper.cg = rep.best().c;
        }
        FccaModel model = fitFcca(red, hyper, ns.g, common.resolvedWorkers());
        converged = model.converged;
        artifact = artifactFromFcca(model, selX, selY, data.p1(), data.p2());
    } else if (method == "kcca") {
        KccaHyper hyper;
        hyper.cf = cf;
        hyper.cg = cg;
        hyper.gammaF = hyper.gammaG = gamma;
        std::vector<double> bwX = bwOverride > 0 ? std::vector<double>(red.p1(), bwOverride)
                                                 : pluginBandwidths(red.x);
        std::vector<double> bwY = bwOverride > 0 ? std::vector<double>(red.p2(), bwOverride)
                                                 : pluginBandwidths(red.y);
        KccaSide sideX = makeKccaSide(
            buildGramSet(red.x, bwX, KernelType::gaussian, common.resolvedWorkers()));
        KccaSide sideY = makeKccaSide(
            buildGramSet(red.y, bwY, KernelType::gaussian, common.resolvedWorkers()));
        KccaCoefficients init = nonsparseAdditiveKcca(sideX, sideY, gamma, gamma);
        if (tune) {
            TuneGrid grid = defaultGrid(red.p1(), red.p2());
            grid.nPerms = perms;
            grid.seed = common.seed;
            TuneInputs in;
            in.data = &red;
            in.kccaInit = &init;
            in.sideX = &sideX;
            in.sideY = &sideY;
            TuneReport rep =
                permutationTune(in, SolverMethod::kcca, grid, common.resolvedWorkers());
            hyper.cf = hyper.cg = rep.best().c;
            hyper.gammaF = hyper.gammaG = rep.best().gamma;
            init = nonsparseAdditiveKcca(sideX, sideY, hyper.gammaF, hyper.gammaG);
        }
        KccaModel model = fitSaKccaOnSides(std::move(sideX), std::move(sideY), hyper, &init);
        converged = model.converged;
        artifact = artifactFromKcca(model, selX, selY, data.p1(), data.p2());
    } else if (method == "scca") {
        LinearCcaSolution sol = sparseLinearCca(data, cf, cg);
        artifact = artifactFromLinear(sol, data, "scca");
    } else if (method == "linear") {
        LinearCcaSolution sol = linearCca(data);
        artifact = artifactFromLinear(sol, data, "linear");
    } else if (method == "kcca-full") {
        FullKccaModel model =
            fullKcca(data, gamma, bwOverride > 0 ? bwOverride : 0, bwOverride > 0 ? bwOverride : 0);
        artifact = artifactFromFullKcca(model);
    } else {
        throw ConfigError("unknown method: " + method);
    }

    artifact.seed = common.seed;
    artifact.config = hash;
    saveArtifact(artifact, common.path("model.json"));

    TsvWriter summary(common.path("summary.tsv"));
    summary.comment("config=" + hash + " seed=" + std::to_string(common.seed));
    summary.header({"method", "objective", "converged", "supportX", "supportY"});
    summary.row({artifact.method, formatG(artifact.objective), converged ? "1" : "0",
                 joinIndices(artifact.supportX), joinIndices(artifact.supportY)});
    summary.close();

    std::cout << "method\t" << artifact.method << "\n";
    std::cout << "objective\t" << formatG(artifact.objective) << "\n";
    std::cout << "supportX\t" << joinIndices(artifact.supportX) << "\n";
    std::cout << "supportY\t" << joinIndices(artifact.supportY) << "\n";
    if (artifact.fNorms.size() > 0)
        for (int j : artifact.supportX)
            std::cout << "fNorm[" << j << "]\t" << formatG(artifact.fNorms[j]) << "\n";
    if (artifact.gNorms.size() > 0)
        for (int k : artifact.supportY)
            std::cout << "gNorm[" << k << "]\t" << formatG(artifact.gNorms[k]) << "\n";
    if (!converged) std::cout << "warning\tnot converged\n";
    return 0;
}

int cmdScreenMain(const Common& common, const std::string& method, const std::string& xPath,
                  const std::string& yPath, const ScreenRule& rule) {
    std::ostringstream canon;
    canon << "screen method=" << method << " x=" << xPath << " y=" << yPath
          << " rule=" << rule.kind << ":" << rule.k << ":" << rule.value
          << " seed=" << common.seed;
    const std::string hash = configHash(canon.str());

    PairedDataset data = loadAndPrep(xPath, yPath, true, false);
    MarginalMethod mm =
        method == "kcca" ? MarginalMethod::kccaPairwise : MarginalMethod::fccaPairwise;
    MarginalMatrix matrix;
    ScreeningResult sel =
        runScreen(data, mm, rule.kind == "none" ? ScreenRule{"topk", data.p1() * data.p2(), 0}
                                                : rule,
                  common.seed, common.resolvedWorkers(), &matrix);

    writeMarginalTsv(matrix, common.path("marginal.tsv"),
                     "config=" + hash + " seed=" + std::to_string(common.seed));
    if (common.gnuplot)
        emitGnuplot(common.path("marginal.tsv"),
                    "plot 'marginal.tsv' matrix with image");

    std::cout << "selectedX\t" << joinIndices(sel.selectedX) << "\n";
    std::cout << "selectedY\t" << joinIndices(sel.selectedY) << "\n";
    std::cout << "threshold\t" << formatG(sel.threshold) << "\n";
    std::cout << "keptPairs\t" << sel.keptEntries.size() << "\n";
    return 0;
}

int cmdCalibrate(const Common& common, const std::string& method, const std::string& xPath,
                 const std::string& yPath, double delta, int perms) {
    std::ostringstream canon;
    canon << "calibrate method=" << method << " x=" << xPath << " y=" << yPath
          << " delta=" << delta << " perms=" << perms << " seed=" << common.seed;
    const std::string hash = configHash(canon.str());

    PairedDataset data = loadAndPrep(xPath, yPath, true, false);
    MarginalMethod mm =
        method == "kcca" ? MarginalMethod::kccaPairwise : MarginalMethod::fccaPairwise;
    const double eps =
        calibrateEpsilon(data, mm, delta, perms, common.seed, common.resolvedWorkers());

    TsvWriter out(common.path("calibrate.tsv"));
    out.comment("config=" + hash + " seed=" + std::to_string(common.seed));
    out.header({"method", "delta", "perms", "epsilon"});
    out.row({method, formatG(delta), std::to_string(perms), formatG(eps)});
    out.close();
    std::cout << "epsilon\t" << formatG(eps) << "\n";
    return 0;
}

int cmdBench(const Common& common, const std::string& scenarioArg, const std::string& method,
             int n, int p, int p1, int p2, double noise, int repeats, const ScreenRule& screen,
             bool tune, double cf, double cg, double gamma, const std::string& init,
             int evalSamples, int perms) {
    std::string name = scenarioArg;
    if (name.rfind("figure1-", 0) == 0) name = name.substr(8);
    Scenario s = defaultScenario(scenarioFromString(name));
    if (n > 0) s.n = n;
    if (p > 0) s.p1 = s.p2 = p;
    if (p1 > 0) s.p1 = p1;
    if (p2 > 0) s.p2 = p2;
    if (noise >= 0) s.noiseSd = noise;
    s.seed = common.seed;

    Pipeline pipe;
    pipe.method = benchMethodFromString(method);
    pipe.cf = cf;
    pipe.cg = cg;
    pipe.gamma = gamma;
    pipe.tune = tune;
    if (tune) {
        TuneGrid grid = defaultGrid(s.p1, s.p2);
        grid.nPerms = perms;
        pipe.tuneGrid = grid;
    }
    pipe.evalSamples = evalSamples;
    pipe.workers = common.resolvedWorkers();
    if (init == "random")
        pipe.init = InitKind::random;
    else if (init != "nonsparse")
        throw ConfigError("init must be nonsparse or random");
    if (screen.kind == "topk") {
        ThresholdRule tr;
        tr.kind = ThresholdRule::Kind::topK;
        tr.k = screen.k;
        pipe.screen = tr;
    } else if (screen.kind == "fixed") {
        ThresholdRule tr;
        tr.kind = ThresholdRule::Kind::fixed;
        tr.epsilon = screen.value;
        pipe.screen = tr;
    } else if (screen.kind != "none") {
        throw ConfigError("bench screening supports topk:K or fixed:EPS");
    }

    std::ostringstream canon;
    canon << "bench scenario=" << scenarioArg << " method=" << method << " n=" << s.n
          << " p1=" << s.p1 << " p2=" << s.p2 << " noise=" << s.noiseSd
          << " repeats=" << repeats << " screen=" << screen.kind << ":" << screen.k << ":"
          << screen.value << " tune=" << tune << " cf=" << cf << " cg=" << cg
          << " gamma=" << gamma << " init=" << init << " eval=" << evalSamples
          << " perms=" << perms << " seed=" << common.seed;
    const std::string hash = configHash(canon.str());

    BenchMetrics metrics = runExperiment(s, pipe, repeats);

    const std::string tsvPath = common.path("bench.tsv");
    TsvWriter out(tsvPath);
    out.comment("config=" + hash + " seed=" + std::to_string(common.seed));
    out.comment("scenario=" + scenarioToString(s.name) + " method=" + method);
    out.header({"row", "repeat", "ok", "converged", "testCorrelation", "precision", "recall",
                "chosenC", "chosenGamma", "screenedAllRelevant", "error"});
    for (size_t r = 0; r < metrics.perRepeat.size(); ++r) {
        const RepeatRecord& rec = metrics.perRepeat[r];
        out.row({"repeat", std::to_string(r), rec.ok ? "1" : "0", rec.converged ? "1" : "0",
                 formatG(rec.testCorrelation),
                 rec.hasSupport ? formatG(rec.precision) : "-",
                 rec.hasSupport ? formatG(rec.recall) : "-", formatG(rec.chosenC),
                 formatG(rec.chosenGamma), rec.screenedAllRelevant ? "1" : "0",
                 rec.error.empty() ? "-" : rec.error});
    }
    out.row({"aggregate", "-", std::to_string(repeats - metrics.failures), "-",
             formatG(metrics.testCorrelation), formatG(metrics.precision),
             formatG(metrics.recall), "-", "-", "-", "-"});
    out.close();
    if (common.gnuplot)
        emitGnuplot(tsvPath, "plot 'bench.tsv' using 2:5 with points title 'test correlation'");

    std::cout << "testCorrelation\t" << formatG(metrics.testCorrelation) << "\n";
    std::cout << "precision\t" << formatG(metrics.precision) << "\n";
    std::cout << "recall\t" << formatG(metrics.recall) << "\n";
    std::cout << "failures\t" << metrics.failures << "\n";
    return 0;
}

int cmdPath(const Common& common, const std::string& method, const std::string& xPath,
            const std::string& yPath, const std::string& cGridText, double gamma,
            const std::string& relXText, const std::string& relYText) {
    std::ostringstream canon;
    canon << "path method=" << method << " x=" << xPath << " y=" << yPath
          << " grid=" << cGridText << " gamma=" << gamma << " relX=" << relXText
          << " relY=" << relYText << " seed=" << common.seed;
    const std::string hash = configHash(canon.str());

    PairedDataset data = loadAndPrep(xPath, yPath, true, false);
    std::vector<double> grid;
    if (cGridText == "auto") {
        const double cMax = std::sqrt(static_cast<double>(std::min(data.p1(), data.p2())));
        for (int i = 0; i < 8; ++i)
            grid.push_back(std::exp(std::log(std::max(cMax, 1.000001)) * i / 7.0));
    } else {
        grid = parseGrid(cGridText);
    }
    SolverMethod sm = method == "kcca" ? SolverMethod::kcca : SolverMethod::fcca;
    std::vector<PathRow> rows =
        regularizationPath(data, sm, grid, parseIndexList(relXText), parseIndexList(relYText),
                           gamma, common.resolvedWorkers());

    const std::string tsvPath = common.path("path.tsv");
    TsvWriter out(tsvPath);
    out.comment("config=" + hash + " seed=" + std::to_string(common.seed));
    out.header({"c", "view", "covariate", "norm", "isRelevant"});
    for (const PathRow& r : rows)
        out.row({formatG(r.c), r.view == 0 ? "x" : "y", std::to_string(r.covariate),
                 formatG(r.norm), r.isRelevant ? "1" : "0"});
    out.close();
    if (common.gnuplot)
        emitGnuplot(tsvPath, "plot 'path.tsv' using 1:4 with linespoints title 'group norms'");
    std::cout << "rows\t" << rows.size() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse additive canonical correlation toolkit"};
    app.require_subcommand(1);

    Common common;

    // fit
    auto* fit = app.add_subcommand("fit", "fit a model on paired CSV files");
    std::string fitMethod = "fcca", fitX, fitY, fitBandwidth = "auto", fitScreen = "none";
    double fitCf = 1.0, fitCg = 1.0, fitGamma = 1e-2;
    bool fitTune = false, fitNoStd = false, fitWinsor = false;
    int fitPerms = 25;
    fit->add_option("--method", fitMethod, "fcca|kcca|scca|linear|kcca-full");
    fit->add_option("--x", fitX, "X view CSV")->required();
    fit->add_option("--y", fitY, "Y view CSV")->required();
    fit->add_option("--cf", fitCf, "X-side sparsity budget");
    fit->add_option("--cg", fitCg, "Y-side sparsity budget");
    fit->add_option("--gamma", fitGamma, "kernel regularization");
    fit->add_option("--bandwidth", fitBandwidth, "auto or a fixed value");
    fit->add_option("--screen", fitScreen, "none|topk:K|fixed:EPS|theory:D|calibrated:D");
    fit->add_flag("--tune", fitTune, "permutation-tune the budgets");
    fit->add_option("--perms", fitPerms, "permutations for tuning");
    fit->add_flag("--no-standardize", fitNoStd, "skip column standardization");
    fit->add_flag("--winsorize", fitWinsor, "winsorize before standardizing");
    common.attach(fit);

    // screen
    auto* screen = app.add_subcommand("screen", "marginal screening matrix + selection");
    std::string scrMethod = "fcca", scrX, scrY, scrRule = "topk:10";
    screen->add_option("--method", scrMethod, "fcca|kcca marginal flavor");
    screen->add_option("--x", scrX, "X view CSV")->required();
    screen->add_option("--y", scrY, "Y view CSV")->required();
    screen->add_option("--rule", scrRule, "topk:K|fixed:EPS|theory:D|calibrated:D");
    common.attach(screen);

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "permutation-calibrated threshold");
    std::string calMethod = "fcca", calX, calY;
    double calDelta = 0.05;
    int calPerms = 40;
    calibrate->add_option("--method", calMethod, "fcca|kcca marginal flavor");
    calibrate->add_option("--x", calX, "X view CSV")->required();
    calibrate->add_option("--y", calY, "Y view CSV")->required();
    calibrate->add_option("--delta", calDelta, "target false-inclusion level");
    calibrate->add_option("--perms", calPerms, "number of permutations");
    common.attach(calibrate);

    // bench
    auto* bench = app.add_subcommand("bench", "synthetic benchmark scenarios");
    std::string benScenario, benMethod = "fcca", benScreen = "none", benInit = "nonsparse";
    int benN = 0, benP = 0, benP1 = 0, benP2 = 0, benRepeats = 10, benEval = 200,
        benPerms = 25;
    double benNoise = -1, benCf = 1.0, benCg = 1.0, benGamma = 1e-2;
    bool benTune = false;
    bench->add_option("scenario", benScenario,
                      "figure1-{square,abs,cos,logsin,linear}|table1|table2|null")
        ->required();
    bench->add_option("--method", benMethod, "fcca|kcca|scca|linear|kcca-full");
    bench->add_option("--n", benN, "samples");
    bench->add_option("--p", benP, "covariates per view");
    bench->add_option("--p1", benP1, "X covariates");
    bench->add_option("--p2", benP2, "Y covariates");
    bench->add_option("--noise", benNoise, "noise standard deviation");
    bench->add_option("--repeats", benRepeats, "number of repeats");
    bench->add_option("--screen", benScreen, "none|topk:K|fixed:EPS");
    bench->add_flag("--tune", benTune, "permutation-tune per repeat");
    bench->add_option("--cf", benCf, "X-side budget");
    bench->add_option("--cg", benCg, "Y-side budget");
    bench->add_option("--gamma", benGamma, "kernel regularization");
    bench->add_option("--init", benInit, "nonsparse|random");
    bench->add_option("--eval-samples", benEval, "held-out evaluation size");
    bench->add_option("--perms", benPerms, "permutations when tuning");
    common.attach(bench);

    // path
    auto* path = app.add_subcommand("path", "regularization path table");
    std::string pathMethod = "fcca", pathX, pathY, pathGrid = "auto", pathRelX, pathRelY;
    double pathGamma = 1e-2;
    path->add_option("--method", pathMethod, "fcca|kcca");
    path->add_option("--x", pathX, "X view CSV")->required();
    path->add_option("--y", pathY, "Y view CSV")->required();
    path->add_option("--cgrid", pathGrid, "auto or comma-separated increasing budgets");
    path->add_option("--gamma", pathGamma, "kernel regularization");
    path->add_option("--relevant-x", pathRelX, "comma-separated relevant X indices");
    path->add_option("--relevant-y", pathRelY, "comma-separated relevant Y indices");
    common.attach(path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*fit)
            return cmdFit(common, fitMethod, fitX, fitY, fitCf, fitCg, fitGamma, fitBandwidth,
                          parseRule(fitScreen), fitTune, fitPerms, fitNoStd, fitWinsor);
        if (*screen) return cmdScreenMain(common, scrMethod, scrX, scrY, parseRule(scrRule));
        if (*calibrate) return cmdCalibrate(common, calMethod, calX, calY, calDelta, calPerms);
        if (*bench)
            return cmdBench(common, benScenario, benMethod, benN, benP, benP1, benP2, benNoise,
                            benRepeats, parseRule(benScreen), benTune, benCf, benCg, benGamma,
                            benInit, benEval, benPerms);
        if (*path)
            return cmdPath(common, pathMethod, pathX, pathY, pathGrid, pathGamma, pathRelX,
                           pathRelY);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CsvError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidDelta& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
