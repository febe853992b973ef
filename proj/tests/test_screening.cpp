#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sacca/data.hpp"
#include "sacca/screening.hpp"

#include <algorithm>
#include <random>

using namespace sacca;

namespace {

Matrix randomMatrix(int n, int p, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Matrix m(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) m(i, j) = gauss(rng);
    return m;
}

bool isSubset(const std::vector<std::pair<int, int>>& small,
              const std::vector<std::pair<int, int>>& big) {
    for (const auto& e : small)
        if (std::find(big.begin(), big.end(), e) == big.end()) return false;
    return true;
}

}  // namespace

TEST_CASE("fixed-threshold selections are exactly the entries above epsilon") {
    MarginalMatrix m;
    m.m.resize(3, 3);
    m.m << 0.9, 0.1, 0.4,
           0.2, 0.8, 0.05,
           0.3, 0.0, 0.45;
    ThresholdRule rule;
    rule.kind = ThresholdRule::Kind::fixed;
    rule.epsilon = 0.35;
    ScreeningResult r = thresholdMarginals(m, rule);
    std::vector<std::pair<int, int>> expected{{0, 0}, {0, 2}, {1, 1}, {2, 2}};
    CHECK(r.keptEntries == expected);
    CHECK(r.selectedX == IndexList{0, 1, 2});
    CHECK(r.selectedY == IndexList{0, 1, 2});
}

TEST_CASE("threshold monotonicity is exact") {
    std::mt19937_64 rng(1);
    MarginalMatrix m;
    m.m = randomMatrix(8, 9, rng).cwiseAbs();
    // Raising epsilon never adds entries.
    std::vector<std::pair<int, int>> prev;
    bool first = true;
    for (double eps = 0.0; eps <= 2.0; eps += 0.05) {
        ThresholdRule rule;
        rule.kind = ThresholdRule::Kind::fixed;
        rule.epsilon = eps;
        ScreeningResult r = thresholdMarginals(m, rule);
        if (!first) CHECK(isSubset(r.keptEntries, prev));
        prev = r.keptEntries;
        first = false;
    }
    // Growing k never removes entries.
    prev.clear();
    first = true;
    for (int k = 1; k <= 72; k += 7) {
        ThresholdRule rule;
        rule.kind = ThresholdRule::Kind::topK;
        rule.k = k;
        ScreeningResult r = thresholdMarginals(m, rule);
        CHECK(static_cast<int>(r.keptEntries.size()) >= k);
        if (!first) CHECK(isSubset(prev, r.keptEntries));
        prev = r.keptEntries;
        first = false;
    }
}

TEST_CASE("topk keeps ties at the cutoff") {
    MarginalMatrix m;
    m.m.resize(2, 2);
    m.m << 0.5, 0.5,
           0.5, 0.1;
    ThresholdRule rule;
    rule.kind = ThresholdRule::Kind::topK;
    rule.k = 2;
    ScreeningResult r = thresholdMarginals(m, rule);
    CHECK(r.keptEntries.size() == 3);
    CHECK(r.threshold == 0.5);
}

TEST_CASE("theory threshold formula") {
    const int n = 150, p1 = 150, p2 = 150;
    const double delta = 0.05;
    double expected = 0.25 / std::sqrt(150.0) +
                      1.0 * std::sqrt(std::log(150.0 * 150.0 / 0.05) / 150.0);
    CHECK(theoryEpsilon(n, p1, p2, delta, 0.25, 1.0) ==
          doctest::Approx(expected).epsilon(1e-12));
    double rkhs = 0.1 + 0.5 * std::sqrt(std::log(20.0 * 30.0 / 0.1) / 80.0);
    CHECK(theoryEpsilon(80, 20, 30, 0.1, 0.1, 0.5, EpsilonForm::rkhs) ==
          doctest::Approx(rkhs).epsilon(1e-12));
    CHECK_THROWS_AS(theoryEpsilon(100, 10, 10, 0.0, 0.25, 1.0), InvalidDelta);
    CHECK_THROWS_AS(theoryEpsilon(100, 10, 10, 1.0, 0.25, 1.0), InvalidDelta);
}

TEST_CASE("marginal matrix is reproducible and transpose symmetric for the kernel route") {
    std::mt19937_64 rng(5);
    const int n = 40;
    Matrix x = randomMatrix(n, 3, rng);
    Matrix y = randomMatrix(n, 4, rng);
    y.col(1) = x.col(0).array().square() * 0.8 + 0.2 * y.col(1).array();
    PairedDataset d = standardize(makeDataset(x, y));
    MarginalMatrix a = buildMarginalMatrix(d, MarginalMethod::kccaPairwise, 11);
    MarginalMatrix b = buildMarginalMatrix(d, MarginalMethod::kccaPairwise, 11);
    CHECK((a.m - b.m).cwiseAbs().maxCoeff() == 0.0);

    PairedDataset swapped = standardize(makeDataset(y, x));
    MarginalMatrix t = buildMarginalMatrix(swapped, MarginalMethod::kccaPairwise, 11);
    CHECK((a.m - t.m.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("marginal scores rank a planted pair first") {
    std::mt19937_64 rng(6);
    const int n = 80;
    Matrix x = randomMatrix(n, 5, rng);
    Matrix y = randomMatrix(n, 5, rng);
    y.col(3) = x.col(2).array().square() + 0.1 * randomMatrix(n, 1, rng).array();
    PairedDataset d = standardize(makeDataset(x, y));
    for (MarginalMethod method : {MarginalMethod::fccaPairwise, MarginalMethod::kccaPairwise}) {
        MarginalMatrix m = buildMarginalMatrix(d, method, 17);
        int bj = 0, bk = 0;
        m.m.maxCoeff(&bj, &bk);
        CHECK(bj == 2);
        CHECK(bk == 3);
    }
}

TEST_CASE("calibrated threshold bounds null false inclusion") {
    // Independent views: a permutation-calibrated epsilon at delta = 0.02
    // (49 permutations, so the exact exchangeability guarantee is 1/50) must
    // keep the whole-matrix false-inclusion rate under 5% of the seeds.
    std::mt19937_64 rng(2025);
    const int n = 40, p = 3;
    int falseInclusions = 0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        PairedDataset d =
            standardize(makeDataset(randomMatrix(n, p, rng), randomMatrix(n, p, rng)));
        double eps = calibrateEpsilon(d, MarginalMethod::fccaPairwise, 0.02, 49,
                                      1000 + s, 4);
        MarginalMatrix m = buildMarginalMatrix(d, MarginalMethod::fccaPairwise, 1000 + s, 4);
        ThresholdRule rule;
        rule.kind = ThresholdRule::Kind::fixed;
        rule.epsilon = eps;
        ScreeningResult r = thresholdMarginals(m, rule);
        if (!r.keptEntries.empty()) ++falseInclusions;
    }
    CHECK(falseInclusions <= 5);
}

TEST_CASE("a degenerate pair scores zero instead of throwing") {
    std::mt19937_64 rng(9);
    const int n = 30;
    std::normal_distribution<double> gauss;
    Vector x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = gauss(rng);
        y[i] = gauss(rng);
    }
    Vector constant = Vector::Constant(n, 1.0);
    SplitPlan split = splitHalf(n, 4);
    CHECK(marginalPairFit(constant, y, MarginalMethod::fccaPairwise, split) == 0.0);
    CHECK(marginalPairFit(x, constant, MarginalMethod::kccaPairwise, split) == 0.0);
    CHECK(std::abs(marginalPairFit(x, y, MarginalMethod::fccaPairwise, split)) <= 1.0);
}
