#pragma once

#include "sacca/baselines.hpp"
#include "sacca/data.hpp"
#include "sacca/fcca.hpp"
#include "sacca/kcca.hpp"
#include "sacca/screening.hpp"
#include "sacca/tuning.hpp"
#include "sacca/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sacca {

enum class ScenarioName { square, abs, cosine, logsin, linear, table1, table2, nullNoise };

ScenarioName scenarioFromString(const std::string& name);
std::string scenarioToString(ScenarioName name);

enum class XDistribution { normal, uniform };

struct Scenario {
    ScenarioName name = ScenarioName::square;
    int n = 150;
    int p1 = 15, p2 = 15;
    double noiseSd = 0.1;
    XDistribution xDistribution = XDistribution::normal;
    std::uint64_t seed = 0;
};

// Canonical dimensions/distribution for a named setup; n, p, seed still apply.
Scenario defaultScenario(ScenarioName name);

struct GeneratedData {
    PairedDataset data;         // raw (not yet standardized)
    IndexList relevantX, relevantY;
};

GeneratedData generateScenario(const Scenario& s);

enum class BenchMethod { fcca, kcca, scca, linear, kccaFull };

BenchMethod benchMethodFromString(const std::string& name);
std::string benchMethodToString(BenchMethod m);

enum class InitKind { nonsparse, random };

struct Pipeline {
    BenchMethod method = BenchMethod::fcca;
    std::optional<ThresholdRule> screen;
    bool tune = false;
    std::optional<TuneGrid> tuneGrid;  // default grid when unset
    double cf = 1.0, cg = 1.0;
    double gamma = 1e-2;
    InitKind init = InitKind::nonsparse;
    int evalSamples = 200;
    int workers = 1;
};

struct SupportScore {
    double precision = 0;
    double recall = 0;
};

// Precision/recall over the union of both views' variables; empty selection
// scores precision 0 against a nonempty truth, 1 against an empty truth.
SupportScore scoreSupport(const IndexList& selX, const IndexList& selY,
                          const IndexList& relX, const IndexList& relY);

struct RepeatRecord {
    std::uint64_t seed = 0;
    bool ok = false;
    bool converged = true;
    double testCorrelation = 0;
    double precision = 0, recall = 0;
    bool hasSupport = true;          // false for methods without variable support
    bool screenedAllRelevant = false;
    double chosenC = 0, chosenGamma = 0;
    std::string error;
};

struct BenchMetrics {
    double testCorrelation = 0;  // means over successful repeats
    double precision = 0, recall = 0;
    int repeats = 0;
    int failures = 0;
    std::vector<RepeatRecord> perRepeat;
};

BenchMetrics runExperiment(const Scenario& s, const Pipeline& pipe, int repeats = 10);

// Single repeat at an explicit seed; the building block runExperiment loops.
RepeatRecord runRepeat(const Scenario& s, const Pipeline& pipe, std::uint64_t seed);

struct PathRow {
    double c = 0;
    int view = 0;  // 0 = x, 1 = y
    int covariate = 0;
    double norm = 0;
    bool isRelevant = false;
};

// Group-norm profiles along an increasing budget grid, warm-started step to
// step. Long format, one row per (budget, view, covariate).
std::vector<PathRow> regularizationPath(const PairedDataset& data, SolverMethod method,
                                        const std::vector<double>& cValues,
                                        const IndexList& relevantX,
                                        const IndexList& relevantY, double gamma = 1e-2,
                                        int workers = 1);

}  // namespace sacca
