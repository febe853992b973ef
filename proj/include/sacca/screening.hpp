#pragma once

#include "sacca/data.hpp"
#include "sacca/fcca.hpp"
#include "sacca/kcca.hpp"
#include "sacca/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sacca {

enum class MarginalMethod { fccaPairwise, kccaPairwise };

struct MarginalMatrix {
    Matrix m;  // p1 x p2 held-out marginal correlations
    MarginalMethod method = MarginalMethod::fccaPairwise;
    SplitPlan split;
    int failedPairs = 0;
};

struct ThresholdRule {
    enum class Kind { topK, theory, fixed } kind = Kind::topK;
    int k = 0;          // topK
    double epsilon = 0; // theory / fixed threshold value
};

struct ScreeningResult {
    IndexList selectedX, selectedY;
    std::vector<std::pair<int, int>> keptEntries;
    double threshold = 0;
    double epsilon = 0;
};

struct MarginalOptions {
    double gamma = 1e-2;      // kcca-pairwise regularization
    double tol = 1e-8;
    int maxIter = 300;
};

// Held-out marginal correlation of one covariate pair, fit without sparsity
// on the train half of the split.
double marginalPairFit(const Vector& xCol, const Vector& yCol, MarginalMethod method,
                       const SplitPlan& split, const MarginalOptions& opts = {});

MarginalMatrix buildMarginalMatrix(const PairedDataset& data, MarginalMethod method,
                                   std::uint64_t seed, int workers = 1,
                                   const MarginalOptions& opts = {});

ScreeningResult thresholdMarginals(const MarginalMatrix& m, const ThresholdRule& rule);

enum class EpsilonForm { sobolev, rkhs };

// Sobolev: C1/sqrt(n) + C2 sqrt(log(p1 p2 / delta) / n)
// RKHS:    zeta      + C  sqrt(log(p1 p2 / delta) / n)
double theoryEpsilon(int n, int p1, int p2, double delta, double c1OrZeta, double c2OrC,
                     EpsilonForm form = EpsilonForm::sobolev);

// Permutation-calibrated threshold: the (1-delta) quantile of the maximum
// marginal correlation under row-permuted pairings.
double calibrateEpsilon(const PairedDataset& data, MarginalMethod method, double delta,
                        int nPerms, std::uint64_t seed, int workers = 1,
                        const MarginalOptions& opts = {});

// Plug-in sample estimate of the RKHS zeta term.
double estimateZeta(const GramSet& x, const GramSet& y);

struct SparseInitFcca {
    AdditiveFit f, g;  // embedded back into full dimension
};

SparseInitFcca buildFccaInit(const PairedDataset& data, const ScreeningResult& selected,
                             int workers = 1);

struct SparseInitKcca {
    KccaCoefficients coeffs;  // over the selected covariates only
    IndexList selectedX, selectedY;
};

SparseInitKcca buildKccaInit(const PairedDataset& data, const ScreeningResult& selected,
                             double gammaF, double gammaG,
                             KernelType kernel = KernelType::gaussian, int workers = 1);

void writeMarginalTsv(const MarginalMatrix& m, const std::string& path,
                      const std::string& headerComment);

}  // namespace sacca
