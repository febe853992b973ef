#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sacca/baselines.hpp"
#include "sacca/data.hpp"

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

}  // namespace

TEST_CASE("identical views give canonical correlation one with matching weights") {
    std::mt19937_64 rng(1);
    Matrix x = randomMatrix(80, 3, rng);
    PairedDataset d = standardize(makeDataset(x, x));
    LinearCcaSolution sol = linearCca(d);
    CHECK(sol.correlation >= 0.999);
    // u and v agree up to scale.
    Vector un = sol.u / sol.u.norm();
    Vector vn = sol.v / sol.v.norm();
    if (un.dot(vn) < 0) vn = -vn;
    CHECK((un - vn).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("univariate linear cca recovers the pearson correlation") {
    std::mt19937_64 rng(2);
    const int n = 200;
    Matrix x = randomMatrix(n, 1, rng);
    Matrix y(n, 1);
    y.col(0) = 0.6 * x.col(0) + 0.8 * randomMatrix(n, 1, rng).col(0);
    PairedDataset d = standardize(makeDataset(x, y));
    LinearCcaSolution sol = linearCca(d, 1e-12);
    CHECK(sol.correlation ==
          doctest::Approx(std::abs(pearson(d.x.col(0), d.y.col(0)))).epsilon(1e-6));
}

TEST_CASE("linear cca matches a brute-force search on a small instance") {
    std::mt19937_64 rng(3);
    const int n = 60;
    Matrix x = randomMatrix(n, 2, rng);
    Matrix y = randomMatrix(n, 1, rng);
    y.col(0) += 0.5 * x.col(0) - 0.3 * x.col(1);
    PairedDataset d = standardize(makeDataset(x, y));
    LinearCcaSolution sol = linearCca(d, 1e-12);
    // With p2 = 1 the best combination is the least-squares direction; scan
    // the angle of u exhaustively as an independent oracle.
    double best = 0;
    for (int step = 0; step < 20000; ++step) {
        const double theta = step * (2.0 * M_PI / 20000);
        Vector u(2);
        u << std::cos(theta), std::sin(theta);
        best = std::max(best, pearson(d.x * u, d.y.col(0)));
    }
    CHECK(sol.correlation == doctest::Approx(best).epsilon(1e-5));
}

TEST_CASE("sparse linear cca with budget one picks the dominant covariate") {
    std::mt19937_64 rng(4);
    const int n = 150;
    Matrix x = randomMatrix(n, 4, rng);
    Matrix y = randomMatrix(n, 4, rng);
    y.col(1) = 0.9 * x.col(2) + 0.2 * y.col(1);
    PairedDataset d = standardize(makeDataset(x, y));
    LinearCcaSolution sol = sparseLinearCca(d, 1.0, 1.0);
    int au, av;
    sol.u.cwiseAbs().maxCoeff(&au);
    sol.v.cwiseAbs().maxCoeff(&av);
    CHECK(au == 2);
    CHECK(av == 1);
    // An l1 budget of 1 on a unit l2 vector forces a single nonzero entry.
    CHECK(sol.u.cwiseAbs().sum() <= 1.0 + 1e-6);
    CHECK(sol.u.norm() == doctest::Approx(1.0).epsilon(1e-8));
    int nnzU = 0;
    for (int j = 0; j < 4; ++j)
        if (std::abs(sol.u[j]) > 1e-8) ++nnzU;
    CHECK(nnzU == 1);
}

TEST_CASE("a slack l1 budget reduces sparse linear cca to unconstrained power steps") {
    std::mt19937_64 rng(5);
    const int n = 120;
    Matrix x = randomMatrix(n, 3, rng);
    Matrix y = randomMatrix(n, 3, rng);
    y.col(0) = 0.7 * x.col(0) + 0.5 * y.col(0);
    PairedDataset d = standardize(makeDataset(x, y));
    LinearCcaSolution slack = sparseLinearCca(d, std::sqrt(3.0), std::sqrt(3.0));
    // Oracle: diagonal-metric CCA is the top singular pair of the
    // cross-covariance matrix.
    Matrix sxy = d.x.transpose() * d.y / static_cast<double>(n);
    Eigen::JacobiSVD<Matrix> svd(sxy, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vector u = svd.matrixU().col(0);
    Vector v = svd.matrixV().col(0);
    if (u.dot(slack.u) < 0) {
        u = -u;
        v = -v;
    }
    CHECK((slack.u - u).cwiseAbs().maxCoeff() < 1e-4);
    CHECK((slack.v - v).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("median row distance on a small hand-checked matrix") {
    Matrix m(3, 2);
    m << 0, 0,
         3, 4,
         0, 8;
    // Pairwise distances: 5, 8, sqrt(9 + 16) = 5 -> {5, 5, 8}, median 5.
    CHECK(medianRowDistance(m) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("whole-row kernel cca captures a planted nonlinear association") {
    std::mt19937_64 rng(6);
    const int n = 120;
    Matrix x = randomMatrix(n, 2, rng);
    Matrix y = randomMatrix(n, 2, rng);
    y.col(0) = x.col(0).array().square() + 0.1 * randomMatrix(n, 1, rng).array();
    PairedDataset d = standardize(makeDataset(x, y));
    FullKccaModel m = fullKcca(d, 1e-2);
    CHECK(m.correlation > 0.9);
    // Self evaluation reproduces the training canonical correlation.
    BaselineEval self = evaluateFullKcca(m, d);
    CHECK(self.correlation == doctest::Approx(m.correlation).epsilon(1e-6));

    // Held-out evaluation keeps most of the association.
    Matrix xt = randomMatrix(n, 2, rng);
    Matrix yt = randomMatrix(n, 2, rng);
    yt.col(0) = xt.col(0).array().square() + 0.1 * randomMatrix(n, 1, rng).array();
    PairedDataset fresh = applyPreprocess(d.prep, xt, yt);
    BaselineEval ev = evaluateFullKcca(m, fresh);
    CHECK(ev.correlation > 0.5);
}

TEST_CASE("whole-row kernel cca requires positive regularization") {
    std::mt19937_64 rng(7);
    PairedDataset d =
        standardize(makeDataset(randomMatrix(30, 2, rng), randomMatrix(30, 2, rng)));
    CHECK_THROWS_AS(fullKcca(d, 0.0), Error);
}

TEST_CASE("linear evaluation applies the fitted weights to fresh rows") {
    std::mt19937_64 rng(8);
    const int n = 90;
    Matrix x = randomMatrix(n, 3, rng);
    Matrix y = randomMatrix(n, 2, rng);
    y.col(1) = 0.8 * x.col(0) + 0.3 * y.col(1);
    PairedDataset d = standardize(makeDataset(x, y));
    LinearCcaSolution sol = linearCca(d);
    PairedDataset fresh = applyPreprocess(d.prep, randomMatrix(40, 3, rng),
                                          randomMatrix(40, 2, rng));
    BaselineEval ev = evaluateLinear(sol, fresh);
    CHECK((ev.fValues - fresh.x * sol.u).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ev.gValues - fresh.y * sol.v).cwiseAbs().maxCoeff() < 1e-12);
}
