#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sacca/kernel.hpp"

#include <Eigen/Eigenvalues>

#include <random>

using namespace sacca;

namespace {

Vector randomVector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    return v;
}

Matrix randomSymmetric(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = gauss(rng);
    return 0.5 * (m + m.transpose());
}

Matrix randomSpd(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Matrix m(n, n + 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n + 2; ++j) m(i, j) = gauss(rng);
    Matrix s = m * m.transpose() / static_cast<double>(n + 2);
    s.diagonal().array() += 0.1;
    return s;
}

}  // namespace

TEST_CASE("gaussian kernel values") {
    CHECK(gaussianKernel(1.0, 1.0, 2.0) == 1.0);
    CHECK(gaussianKernel(0.0, 2.0, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(gaussianKernel(0.0, 1.0, 0.5) ==
          doctest::Approx(std::exp(-1.0 / (2.0 * 0.25))).epsilon(1e-12));
    CHECK_THROWS_AS(gaussianKernel(0.0, 1.0, 0.0), NonpositiveBandwidth);
}

TEST_CASE("plugin bandwidth equals the median pairwise absolute difference") {
    // Points {0,1,3}: pairwise gaps {1,2,3}, median 2.
    Vector a(3);
    a << 0, 1, 3;
    CHECK(pluginBandwidth(a) == doctest::Approx(2.0).epsilon(1e-12));
    // Points {0,1}: single gap.
    Vector b(2);
    b << 0, 1;
    CHECK(pluginBandwidth(b) == doctest::Approx(1.0).epsilon(1e-12));
    // Points {0,1,2,4}: gaps {1,2,4,1,3,2} sorted {1,1,2,2,3,4}, median 2.
    Vector c(4);
    c << 0, 1, 2, 4;
    CHECK(pluginBandwidth(c) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("plugin bandwidth of standard normals approximates its population value") {
    // |X - X'| for X, X' ~ N(0,1) is half-normal with scale sqrt(2); its
    // median is sqrt(2) * Phi^-1(3/4) ~ 0.9539.
    std::mt19937_64 rng(77);
    Vector v = randomVector(1000, rng);
    double h = pluginBandwidth(v);
    CHECK(h > 0.80);
    CHECK(h < 1.10);
}

TEST_CASE("plugin bandwidth falls back to positive gaps on tied columns") {
    Vector v(5);
    v << 1, 1, 1, 1, 2;  // most pairwise gaps are zero
    CHECK(pluginBandwidth(v) == doctest::Approx(1.0).epsilon(1e-12));
    Vector w = Vector::Constant(5, 3.0);
    CHECK_THROWS_AS(pluginBandwidth(w), DegenerateColumn);
}

TEST_CASE("centered gram has zero row sums and matches direct double centering") {
    std::mt19937_64 rng(5);
    Vector col = randomVector(25, rng);
    Gram g = buildGram(col, 0.8);
    CHECK(g.k.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);
    CHECK((g.k - g.k.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    // Direct H K H oracle.
    const int n = 25;
    Matrix raw(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) raw(i, j) = gaussianKernel(col[i], col[j], 0.8);
    Matrix h = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
    Matrix centered = h * raw * h;
    CHECK((g.k - centered).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("centered kernel vector reproduces gram columns at training points") {
    std::mt19937_64 rng(6);
    Vector col = randomVector(15, rng);
    Gram g = buildGram(col, 1.1);
    for (int i = 0; i < 15; ++i) {
        Vector v = centeredKernelVector(g, col[i]);
        CHECK((v - g.k.col(i)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("linear kernel gram equals centered outer product") {
    std::mt19937_64 rng(7);
    Vector col = randomVector(12, rng);
    Gram g = buildGram(col, 0.0, KernelType::linear);
    Vector c = col.array() - col.mean();
    Matrix oracle = c * c.transpose();
    CHECK((g.k - oracle).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("generalized eigensolver matches a dense full-spectrum oracle") {
    // 100 random symmetric-definite pencils up to dim 30: residual below 1e-8
    // and agreement with the QZ-based full solve.
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim(2, 30);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = dim(rng);
        Matrix a = randomSymmetric(n, rng);
        Matrix b = randomSpd(n, rng);
        GenEigResult r = topGenEig(a, b);
        CHECK(r.residualNorm <= 1e-8 * std::max(a.norm(), 1.0));
        CHECK((a * r.vector - r.value * (b * r.vector)).norm() <=
              1e-7 * std::max(a.norm(), 1.0));
        CHECK(r.vector.dot(b * r.vector) == doctest::Approx(1.0).epsilon(1e-8));

        Eigen::GeneralizedEigenSolver<Matrix> full(a, b);
        double best = -1e300;
        for (int i = 0; i < n; ++i) {
            std::complex<double> lam = full.eigenvalues()[i];
            if (std::abs(lam.imag()) < 1e-8) best = std::max(best, lam.real());
        }
        CHECK(r.value == doctest::Approx(best).epsilon(1e-7));
    }
}

TEST_CASE("generalized eigensolver handles a semidefinite metric via ridging") {
    std::mt19937_64 rng(9);
    const int n = 8;
    Matrix a = randomSymmetric(n, rng);
    Matrix low = Matrix::Zero(n, n);
    Vector u = randomVector(n, rng);
    low = u * u.transpose();  // rank one, singular
    GenEigResult r = topGenEig(a, low);
    CHECK(r.vector.allFinite());
    CHECK(std::isfinite(r.value));
}
