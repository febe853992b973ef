#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sacca/smoothing.hpp"

#include <random>

using namespace sacca;

namespace {

Vector randomVector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    return v;
}

}  // namespace

TEST_CASE("local linear smoother reproduces constants and the design exactly") {
    // 100 random columns and bandwidths; S 1 = 1 and S x = x to 1e-8.
    std::mt19937_64 rng(314);
    std::uniform_int_distribution<int> sizes(10, 60);
    std::uniform_real_distribution<double> bws(0.05, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = sizes(rng);
        Vector col = randomVector(n, rng);
        Smoother s = buildSmoother(col, bws(rng));
        Vector ones = Vector::Ones(n);
        CHECK((s.s * ones - ones).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((s.s * col - col).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("smoother rows are per-point weighted least squares fits") {
    // Row i of S must equal e1^T (D^T W D)^-1 D^T W for the local design
    // D = [1, x - x_i] and gaussian weights W at x_i.
    std::mt19937_64 rng(42);
    const int n = 20;
    Vector col = randomVector(n, rng);
    const double h = 0.7;
    Smoother s = buildSmoother(col, h);
    for (int i = 0; i < n; ++i) {
        Matrix d(n, 2);
        Vector w(n);
        for (int j = 0; j < n; ++j) {
            d(j, 0) = 1.0;
            d(j, 1) = col[j] - col[i];
            const double u = d(j, 1) / s.bandwidth;
            w[j] = std::exp(-0.5 * u * u);
        }
        Matrix dtwd = d.transpose() * w.asDiagonal() * d;
        Matrix row = dtwd.ldlt().solve(d.transpose() * w.asDiagonal());
        CHECK((s.s.row(i) - row.row(0)).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("smoother of a smooth function is close to the truth at interior points") {
    std::mt19937_64 rng(8);
    const int n = 400;
    Vector col(n);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int i = 0; i < n; ++i) col[i] = unif(rng);
    Vector target = col.array().square();
    Smoother s = buildSmoother(col, 0.1);
    Vector fit = smoothApply(s.s, target);
    double worst = 0;
    for (int i = 0; i < n; ++i)
        if (std::abs(col[i]) < 0.8) worst = std::max(worst, std::abs(fit[i] - target[i]));
    CHECK(worst < 0.05);
}

TEST_CASE("bandwidth edge cases") {
    std::mt19937_64 rng(10);
    Vector col = randomVector(12, rng);
    CHECK_THROWS_AS(buildSmoother(col, 0.0), NonpositiveBandwidth);
    // Hopelessly narrow bandwidths eventually give up even after inflation.
    CHECK_THROWS_AS(buildSmoother(col, 1e-15), SingularLocalFit);
    // An equally spaced grid with a bandwidth near the spacing succeeds,
    // possibly after inflation, and still reproduces constants.
    Vector grid(10);
    for (int i = 0; i < 10; ++i) grid[i] = 0.1 * i;
    Smoother s = buildSmoother(grid, 0.02);
    CHECK(s.bandwidth >= 0.02);
    CHECK(s.s.allFinite());
    Vector ones = Vector::Ones(10);
    CHECK((s.s * ones - ones).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("extendFit interpolates the design points exactly") {
    std::mt19937_64 rng(11);
    Vector design = randomVector(30, rng);
    Vector fitted = randomVector(30, rng);
    Vector again = extendFit(design, fitted, design);
    CHECK((again - fitted).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("extendFit is piecewise linear between and beyond the design points") {
    Vector design(4);
    design << 0, 1, 2, 4;
    Vector fitted(4);
    fitted << 1, 3, 2, 6;
    Vector q(5);
    q << 0.5, 1.5, 3.0, -1.0, 5.0;
    Vector v = extendFit(design, fitted, q);
    CHECK(v[0] == doctest::Approx(2.0).epsilon(1e-12));   // midpoint of (1,3)
    CHECK(v[1] == doctest::Approx(2.5).epsilon(1e-12));   // midpoint of (3,2)
    CHECK(v[2] == doctest::Approx(4.0).epsilon(1e-12));   // halfway 2 -> 6
    CHECK(v[3] == doctest::Approx(-1.0).epsilon(1e-12));  // left slope 2 continued
    CHECK(v[4] == doctest::Approx(8.0).epsilon(1e-12));   // right slope 2 continued
}

TEST_CASE("extendFit averages duplicated design points") {
    Vector design(4);
    design << 0, 1, 1, 2;
    Vector fitted(4);
    fitted << 0, 2, 4, 1;
    Vector q(1);
    q << 1.0;
    Vector v = extendFit(design, fitted, q);
    CHECK(v[0] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("smoother set builds one smoother per column") {
    std::mt19937_64 rng(12);
    Matrix data(25, 3);
    for (int j = 0; j < 3; ++j) data.col(j) = randomVector(25, rng);
    SmootherSet set = buildSmootherSet(data, {0.5, 0.9, 1.4});
    CHECK(set.count() == 3);
    for (int j = 0; j < 3; ++j) {
        CHECK((set.smoothers[j].design - data.col(j)).norm() == 0);
        Vector ones = Vector::Ones(25);
        CHECK((set.smoothers[j].s * ones - ones).cwiseAbs().maxCoeff() < 1e-8);
    }
}
