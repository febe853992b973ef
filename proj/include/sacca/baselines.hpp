#pragma once

#include "sacca/data.hpp"
#include "sacca/kernel.hpp"
#include "sacca/types.hpp"

namespace sacca {

struct LinearCcaSolution {
    Vector u, v;
    double correlation = 0;
};

// Classical CCA as a generalized eigenproblem with ridge-stabilized metrics.
LinearCcaSolution linearCca(const PairedDataset& data, double ridge = 1e-6);

// Diagonal-metric sparse CCA: alternating soft-thresholded power updates with
// the threshold bisected so each weight vector meets its l1 budget.
LinearCcaSolution sparseLinearCca(const PairedDataset& data, double c1, double c2,
                                  int maxIter = 200);

struct FullKccaModel {
    Vector alpha, beta;    // dual coefficients over samples
    double correlation = 0;
    Matrix trainX, trainY;
    double bwX = 0, bwY = 0;
    Vector rowMeanX, rowMeanY;
    double grandMeanX = 0, grandMeanY = 0;
    double objective = 0;
};

// Whole-row (non-additive) kernel CCA with multivariate Gaussian kernels.
FullKccaModel fullKcca(const PairedDataset& data, double gamma, double bwX = 0,
                       double bwY = 0);

// Held-out canonical variates and their correlation.
struct BaselineEval {
    Vector fValues, gValues;
    double correlation = 0;
};

BaselineEval evaluateLinear(const LinearCcaSolution& sol, const PairedDataset& newData);
BaselineEval evaluateFullKcca(const FullKccaModel& model, const PairedDataset& newData);

// Median pairwise Euclidean row distance, the multivariate bandwidth rule.
double medianRowDistance(const Matrix& m);

}  // namespace sacca
