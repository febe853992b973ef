#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sacca/bench.hpp"

using namespace sacca;

TEST_CASE("scenario names round trip") {
    for (ScenarioName name :
         {ScenarioName::square, ScenarioName::abs, ScenarioName::cosine,
          ScenarioName::logsin, ScenarioName::linear, ScenarioName::table1,
          ScenarioName::table2, ScenarioName::nullNoise})
        CHECK(scenarioFromString(scenarioToString(name)) == name);
    CHECK_THROWS_AS(scenarioFromString("bogus"), ConfigError);
}

TEST_CASE("default scenario dimensions") {
    Scenario t1 = defaultScenario(ScenarioName::table1);
    CHECK(t1.n == 75);
    CHECK(t1.p1 == 10);
    Scenario t2 = defaultScenario(ScenarioName::table2);
    CHECK(t2.n == 150);
    CHECK(t2.p1 == 150);
    CHECK(t2.p2 == 150);
    CHECK(t2.xDistribution == XDistribution::uniform);
    Scenario sq = defaultScenario(ScenarioName::square);
    CHECK(sq.n == 150);
    CHECK(sq.p1 == 15);
}

TEST_CASE("generator is deterministic in the seed") {
    Scenario s = defaultScenario(ScenarioName::square);
    s.seed = 9;
    GeneratedData a = generateScenario(s);
    GeneratedData b = generateScenario(s);
    CHECK((a.data.x - b.data.x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.data.y - b.data.y).cwiseAbs().maxCoeff() == 0.0);
    s.seed = 10;
    GeneratedData c = generateScenario(s);
    CHECK((a.data.x - c.data.x).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("noise-free links are exact") {
    Scenario s = defaultScenario(ScenarioName::square);
    s.noiseSd = 0.0;
    s.seed = 3;
    GeneratedData g = generateScenario(s);
    CHECK((g.data.y.col(0).array() - g.data.x.col(0).array().square())
              .abs()
              .maxCoeff() < 1e-14);
    CHECK(g.relevantX == IndexList{0});
    CHECK(g.relevantY == IndexList{0});

    s.name = ScenarioName::linear;
    GeneratedData lin = generateScenario(s);
    CHECK((lin.data.y.col(0) - lin.data.x.col(0)).cwiseAbs().maxCoeff() < 1e-14);

    s.name = ScenarioName::logsin;
    GeneratedData ls = generateScenario(s);
    CHECK((ls.data.y.col(0).array() - ls.data.x.col(0).array().sin().exp())
              .abs()
              .maxCoeff() < 1e-14);
}

TEST_CASE("table2 responses share components across the first four covariates") {
    Scenario s = defaultScenario(ScenarioName::table2);
    s.noiseSd = 0.0;
    s.seed = 12;
    GeneratedData g = generateScenario(s);
    CHECK(g.relevantX == IndexList{0, 1, 2, 3});
    CHECK(g.relevantY == IndexList{0, 1, 2, 3});
    // Each response leaves out its own component: Y_0 + f_0 = Y_1 + f_1 = ...
    // so Y_0 - Y_1 = f_1 - f_0 and (Y_0 - Y_1) + (Y_2 - Y_0) + (Y_1 - Y_2) = 0.
    Vector zero = (g.data.y.col(0) - g.data.y.col(1)) +
                  (g.data.y.col(2) - g.data.y.col(0)) +
                  (g.data.y.col(1) - g.data.y.col(2));
    CHECK(zero.cwiseAbs().maxCoeff() < 1e-12);
    // Noise-free responses are functions of X alone and are highly dependent
    // between distinct response columns (they share two of three components).
    CHECK(std::abs(pearson(g.data.y.col(0), g.data.y.col(1))) > 0.3);
    // Uniform design stays inside the unit interval.
    CHECK(g.data.x.minCoeff() >= 0.0);
    CHECK(g.data.x.maxCoeff() <= 1.0);
}

TEST_CASE("null scenario has no relevant covariates") {
    Scenario s = defaultScenario(ScenarioName::nullNoise);
    s.seed = 4;
    GeneratedData g = generateScenario(s);
    CHECK(g.relevantX.empty());
    CHECK(g.relevantY.empty());
}

TEST_CASE("support scoring counts hits across both views") {
    SupportScore sc = scoreSupport({0, 5}, {1}, {0}, {1});
    CHECK(sc.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(sc.recall == 1.0);
    // Same index in the two views counts separately.
    SupportScore views = scoreSupport({2}, {2}, {2}, {3});
    CHECK(views.precision == 0.5);
    CHECK(views.recall == 0.5);
    SupportScore empty = scoreSupport({}, {}, {0}, {});
    CHECK(empty.precision == 0.0);
    CHECK(empty.recall == 0.0);
    SupportScore allEmpty = scoreSupport({}, {}, {}, {});
    CHECK(allEmpty.precision == 1.0);
    CHECK(allEmpty.recall == 1.0);
}

TEST_CASE("one repeat of the square scenario recovers the planted pair") {
    Scenario s = defaultScenario(ScenarioName::square);
    s.seed = 7;
    Pipeline p;  // fcca, no screening, no tuning, cf = cg = 1
    RepeatRecord r = runRepeat(s, p, 7);
    CHECK(r.ok);
    CHECK(r.testCorrelation > 0.9);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
}

TEST_CASE("experiments aggregate only successful repeats and keep per-repeat rows") {
    Scenario s = defaultScenario(ScenarioName::square);
    s.n = 80;
    s.p1 = s.p2 = 5;
    s.seed = 13;
    Pipeline p;
    p.evalSamples = 100;
    BenchMetrics m = runExperiment(s, p, 3);
    CHECK(m.repeats == 3);
    CHECK(m.failures == 0);
    REQUIRE(m.perRepeat.size() == 3);
    double mean = 0;
    for (const RepeatRecord& r : m.perRepeat) {
        CHECK(r.ok);
        mean += r.testCorrelation;
    }
    CHECK(m.testCorrelation == doctest::Approx(mean / 3.0).epsilon(1e-12));
    // Repeat seeds differ, so the draws differ.
    CHECK(m.perRepeat[0].seed != m.perRepeat[1].seed);
}

TEST_CASE("workers do not change experiment results") {
    Scenario s = defaultScenario(ScenarioName::square);
    s.n = 80;
    s.p1 = s.p2 = 5;
    s.seed = 17;
    Pipeline p;
    p.evalSamples = 100;
    p.workers = 1;
    BenchMetrics serial = runExperiment(s, p, 3);
    p.workers = 3;
    BenchMetrics parallel = runExperiment(s, p, 3);
    REQUIRE(serial.perRepeat.size() == parallel.perRepeat.size());
    for (size_t i = 0; i < serial.perRepeat.size(); ++i)
        CHECK(serial.perRepeat[i].testCorrelation ==
              parallel.perRepeat[i].testCorrelation);
}

TEST_CASE("regularization path separates the relevant covariate and validates its grid") {
    Scenario s = defaultScenario(ScenarioName::square);
    s.n = 90;
    s.p1 = s.p2 = 6;
    s.seed = 23;
    GeneratedData g = generateScenario(s);
    PairedDataset d = standardize(g.data);
    std::vector<double> cs{1.0, 1.4, 2.0};
    std::vector<PathRow> rows =
        regularizationPath(d, SolverMethod::fcca, cs, g.relevantX, g.relevantY);
    CHECK(rows.size() == cs.size() * (6 + 6));
    for (double c : cs) {
        double relMin = 1e300, irrMax = 0;
        for (const PathRow& r : rows)
            if (r.c == c) {
                if (r.isRelevant)
                    relMin = std::min(relMin, r.norm);
                else
                    irrMax = std::max(irrMax, r.norm);
            }
        CHECK(relMin > irrMax);
    }
    CHECK_THROWS_AS(regularizationPath(d, SolverMethod::fcca, {2.0, 1.0}, g.relevantX,
                                       g.relevantY),
                    ConfigError);
    CHECK_THROWS_AS(
        regularizationPath(d, SolverMethod::fcca, {}, g.relevantX, g.relevantY),
        ConfigError);
}
