#pragma once

#include "sacca/errors.hpp"
#include "sacca/types.hpp"

#include <vector>

namespace sacca {

enum class KernelType { gaussian, linear };

// exp(-(x-y)^2 / (2 h^2))
double gaussianKernel(double x, double y, double h);

// Median of all pairwise absolute differences; subsamples to 2000 points
// above that size. Throws DegenerateColumn when all values coincide.
double pluginBandwidth(const Vector& column);

// One covariate's centered Gram K <- H K H plus what out-of-sample
// evaluation needs to reproduce the same centering.
struct Gram {
    Matrix k;             // centered, n x n
    Vector design;        // the column the Gram was built on
    double bandwidth = 0; // unused for the linear kernel
    KernelType kernel = KernelType::gaussian;
    Vector rawRowMean;    // row means of the uncentered Gram
    double rawGrandMean = 0;
};

Gram buildGram(const Vector& column, double bandwidth,
               KernelType kernel = KernelType::gaussian);

struct GramSet {
    std::vector<Gram> grams;
    bool centered = true;

    int count() const { return static_cast<int>(grams.size()); }
};

GramSet buildGramSet(const Matrix& data, const std::vector<double>& bandwidths,
                     KernelType kernel = KernelType::gaussian, int workers = 1);

std::vector<double> pluginBandwidths(const Matrix& data);

// Centered kernel column for a query point: entry i is the centered-kernel
// evaluation k~(x, X_i), so that f(x) = v . alpha extends Gram-product fits.
Vector centeredKernelVector(const Gram& g, double x);

struct GenEigResult {
    double value = 0;
    Vector vector;
    double residualNorm = 0;
};

// Largest-eigenvalue solution of A w = rho B w for symmetric A and positive
// definite B (a ridge of 1e-8 trace(B)/dim is added when the Cholesky
// factorization fails). The returned vector has w^T B w = 1.
GenEigResult topGenEig(const Matrix& a, const Matrix& b, double tol = 1e-8);

}  // namespace sacca
