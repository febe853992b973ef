#pragma once

#include "sacca/data.hpp"
#include "sacca/smoothing.hpp"
#include "sacca/types.hpp"

#include <vector>

namespace sacca {

constexpr double kSupportTol = 1e-6;

// Per-covariate fitted function values at the sample points, one row per
// covariate, plus the group (RMS) norms the sparsity constraint acts on.
struct AdditiveFit {
    Matrix values;     // p x n
    Vector groupNorms; // RMS norms, consistent with values
    double totalL1 = 0;
    double totalL2sq = 0;

    void recompute();
    IndexList support(double tol = kSupportTol) const;
    Vector sum() const;  // length-n additive sum over covariates
    bool isZero() const { return totalL2sq < 1e-24; }
};

AdditiveFit zeroFit(int p, int n);
AdditiveFit fitFromValues(Matrix values);

enum class ThresholdBranch { none, maxNormFallback, softThreshold };

struct ThresholdDiag {
    ThresholdBranch branch = ThresholdBranch::none;
    double lambda = 0;
    double gamma = 0;
    int bisectionSteps = 0;
};

// The f-update of the backfitting loop: normalize the smoothed components to
// unit total energy; when their group-l1 mass exceeds the budget, either keep
// only the maximum-norm components (budget below 1) or group-soft-threshold
// with the multiplier found by bisection so the l1 mass equals the budget.
AdditiveFit softThresholdUpdate(const std::vector<Vector>& smoothed, double budget,
                                ThresholdDiag* diag = nullptr);

struct FccaHyper {
    double cf = 1.0;
    double cg = 1.0;
    std::vector<double> bwX, bwY;  // empty -> plug-in bandwidths
    double tol = 1e-6;
    int maxIter = 200;
};

struct FccaModel {
    AdditiveFit f, g;
    double objective = 0;
    int iterations = 0;
    bool converged = false;
    FccaHyper hyper;
    std::vector<double> objectiveTrace;  // one entry per half-sweep
    std::vector<double> functionChangeTrace;
    SmootherSet smootherX, smootherY;
    Matrix designX, designY;
};

double fccaObjective(const AdditiveFit& f, const AdditiveFit& g);

enum class View { x, y };

// One constrained half-sweep: replaces the named view by the thresholded,
// centered update against the opposite view's current sum.
void backfitSweep(FccaModel& model, View view, double budget,
                  ThresholdDiag* diag = nullptr);

FccaModel fitFcca(const PairedDataset& data, const FccaHyper& hyper,
                  const AdditiveFit& gInit, int workers = 1);

// Backfitting without the threshold branch; used for initialization and for
// marginal pairwise fits. A zero gInit means "start from the Y row sums".
FccaModel fitNonsparseFcca(const PairedDataset& data, FccaHyper hyper,
                           const AdditiveFit* gInit = nullptr, int workers = 1);

struct EvalResult {
    Vector fValues, gValues;
    double correlation = 0;
};

EvalResult evaluateFit(const FccaModel& model, const PairedDataset& newData);

AdditiveFit randomInit(int p, int n, std::uint64_t seed);

}  // namespace sacca
