#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sacca/bench.hpp"
#include "sacca/io.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

using namespace sacca;

namespace {

Matrix randomMatrix(int n, int p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Matrix m(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) m(i, j) = gauss(rng);
    return m;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("number formatting is fixed width-independent and round trips") {
    CHECK(formatG(1.0) == "1");
    CHECK(formatG(0.5) == "0.5");
    CHECK(formatG(-3.25) == "-3.25");
    CHECK(formatG(1e-12) == "1e-12");
    CHECK(formatG(123456789012.0) == "1.23456789e+11");
    // Ten significant digits survive a parse back.
    double v = 0.1234567891234;
    CHECK(std::stod(formatG(v)) == doctest::Approx(v).epsilon(1e-9));
}

TEST_CASE("config hashes are stable and distinguish configs") {
    std::string a = configHash("method=fcca;c=1.5;seed=7");
    CHECK(a.size() == 16);
    CHECK(a == configHash("method=fcca;c=1.5;seed=7"));
    CHECK(a != configHash("method=fcca;c=1.5;seed=8"));
    // FNV-1a of the empty string.
    CHECK(configHash("") == "cbf29ce484222325");
}

TEST_CASE("tsv writer emits comments, headers, and rows verbatim") {
    const char* path = "test_io_writer.tsv";
    {
        TsvWriter w(path);
        w.comment("config 0123");
        w.header({"a", "b"});
        w.row({"1", "2.5"});
        w.close();
    }
    CHECK(slurp(path) == "# config 0123\na\tb\n1\t2.5\n");
    std::remove(path);
}

TEST_CASE("additive model artifacts round trip and evaluate consistently") {
    Scenario s = defaultScenario(ScenarioName::square);
    s.n = 80;
    s.p1 = s.p2 = 4;
    s.seed = 5;
    GeneratedData g = generateScenario(s);
    PairedDataset d = standardize(g.data);
    FccaHyper hyper;
    FccaModel model = fitFcca(d, hyper, fitNonsparseFcca(d, hyper).g);
    IndexList all{0, 1, 2, 3};
    ModelArtifact a = artifactFromFcca(model, all, all, 4, 4);
    a.seed = 42;
    a.config = configHash("test");

    const char* path = "test_io_artifact.json";
    saveArtifact(a, path);
    ModelArtifact b = loadArtifact(path);
    std::remove(path);

    CHECK(b.method == "fcca");
    CHECK(b.seed == 42);
    CHECK(b.version == kVersion);
    CHECK(b.supportX == a.supportX);
    CHECK(b.supportY == a.supportY);
    CHECK(b.objective == doctest::Approx(a.objective).epsilon(1e-12));

    // The reloaded artifact reproduces the in-memory evaluation to 1e-8.
    ArtifactEval evA = evaluateArtifact(a, d);
    ArtifactEval evB = evaluateArtifact(b, d);
    CHECK((evA.fValues - evB.fValues).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(std::abs(evA.objective - evB.objective) < 1e-8);
    // At the training points the tables reproduce the fitted objective.
    CHECK(evA.objective == doctest::Approx(model.objective).epsilon(1e-8));
}

TEST_CASE("kernel model artifacts evaluate like the fitted model on fresh data") {
    Scenario s = defaultScenario(ScenarioName::abs);
    s.n = 70;
    s.p1 = s.p2 = 3;
    s.seed = 11;
    GeneratedData g = generateScenario(s);
    PairedDataset d = standardize(g.data);
    KccaHyper hyper;
    KccaModel model = fitSaKcca(d, hyper);
    IndexList all{0, 1, 2};
    ModelArtifact a = artifactFromKcca(model, all, all, 3, 3);
    const char* path = "test_io_kcca.json";
    saveArtifact(a, path);
    ModelArtifact b = loadArtifact(path);
    std::remove(path);

    Scenario fresh = s;
    fresh.seed = 12;
    PairedDataset ev = applyPreprocess(d.prep, generateScenario(fresh).data.x,
                                       generateScenario(fresh).data.y);
    KccaEvalResult direct = evaluateKcca(model, ev);
    ArtifactEval viaTables = evaluateArtifact(b, ev);
    // Piecewise-linear tables approximate the kernel extension closely.
    CHECK(std::abs(direct.correlation - viaTables.correlation) < 0.05);
    CHECK(pearson(direct.fValues, viaTables.fValues) > 0.97);
}

TEST_CASE("whole-row artifacts reproduce the dual expansion exactly") {
    Scenario s = defaultScenario(ScenarioName::square);
    s.n = 60;
    s.p1 = s.p2 = 2;
    s.seed = 21;
    GeneratedData g = generateScenario(s);
    PairedDataset d = standardize(g.data);
    FullKccaModel model = fullKcca(d, 1e-2);
    ModelArtifact a = artifactFromFullKcca(model);
    const char* path = "test_io_full.json";
    saveArtifact(a, path);
    ModelArtifact b = loadArtifact(path);
    std::remove(path);
    CHECK(b.wholeRow);
    ArtifactEval evA = evaluateArtifact(a, d);
    ArtifactEval evB = evaluateArtifact(b, d);
    CHECK((evA.fValues - evB.fValues).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(evB.correlation == doctest::Approx(model.correlation).epsilon(1e-8));
}

TEST_CASE("loading rejects missing or malformed artifacts") {
    CHECK_THROWS_AS(loadArtifact("definitely_missing.json"), ConfigError);
    const char* path = "test_io_bad.json";
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS_AS(loadArtifact(path), ConfigError);
    {
        std::ofstream out(path);
        out << "{\"method\": \"fcca\"}";
    }
    CHECK_THROWS_AS(loadArtifact(path), ConfigError);
    std::remove(path);
}
