#pragma once

#include "sacca/data.hpp"
#include "sacca/kernel.hpp"
#include "sacca/types.hpp"

#include <vector>

namespace sacca {

// Spectral factorization K = B diag(d) B^T of a centered Gram, truncated at
// the numerical rank. Coefficients are carried in this basis (z = d .* B^T a),
// which makes the per-block quadratic terms diagonal; the dual expansion is
// recovered as alpha = B diag(1/d) z.
struct GramBasis {
    Matrix b;  // n x r, orthonormal columns
    Vector d;  // r positive eigenvalues, descending
};

GramBasis gramBasis(const Gram& g, double relCutoff = 1e-10);

// One view's Grams plus everything the coefficient-space solvers reuse.
struct KccaSide {
    std::vector<Gram> grams;
    std::vector<GramBasis> bases;
    Matrix stacked;            // n x dim, the bases side by side
    std::vector<int> offsets;  // block starts; back() == dim
    Matrix crossGram;          // (1/n) stacked^T stacked

    int covariates() const { return static_cast<int>(bases.size()); }
    int dim() const { return offsets.back(); }
    int blockStart(int j) const { return offsets[j]; }
    int blockSize(int j) const { return offsets[j + 1] - offsets[j]; }
};

KccaSide makeKccaSide(GramSet grams, double relCutoff = 1e-10);

struct KccaHyper {
    double gammaF = 1e-2;
    double gammaG = 1e-2;
    double cf = 1.0;
    double cg = 1.0;
    std::vector<double> bwX, bwY;
    KernelType kernel = KernelType::gaussian;
    double tol = 1e-6;
    int maxIter = 200;
};

struct KccaCoefficients {
    Vector zx, zy;  // stacked per-block coefficients

    Vector blockX(const KccaSide& side, int j) const {
        return zx.segment(side.blockStart(j), side.blockSize(j));
    }
    Vector blockY(const KccaSide& side, int k) const {
        return zy.segment(side.blockStart(k), side.blockSize(k));
    }
};

// Group (RMS) norms of the per-covariate function values, one per block.
Vector kccaGroupNorms(const KccaSide& side, const Vector& z, int n);

// Dual coefficients alpha_j for kernel-expansion evaluation.
Matrix kccaAlpha(const KccaSide& side, const Vector& z);

// Stacked generalized eigenproblem without the l1 constraints;
// each side is rescaled so its quadratic (metric) constraint is tight.
KccaCoefficients nonsparseAdditiveKcca(const KccaSide& x, const KccaSide& y,
                                       double gammaF, double gammaG);

struct SubproblemDiag {
    double mu = 0;          // l1 multiplier (0 when the budget is slack)
    double lambda = 0;      // quadratic multiplier, 1/(2t)
    double kktResidual = 0;
    double l1 = 0;
    int bisectionSteps = 0;
    bool budgetTight = false;
};

// One convex half-step: maximize (1/n) <target, sum_j B_j z_j> over the
// side's quadratic-plus-smoothness ball with the group-l1 budget, via
// blockwise coordinate minimization of the penalized Lagrangian and outer
// bisection on the l1 multiplier.
Vector sparseSubproblem(const Vector& target, const KccaSide& side, double gamma,
                        double budget, const Vector* warmStart = nullptr,
                        SubproblemDiag* diag = nullptr);

struct KccaModel {
    KccaCoefficients coeffs;
    KccaSide sideX, sideY;
    KccaHyper hyper;
    double objective = 0;
    Vector fNorms, gNorms;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objectiveTrace;

    IndexList supportX(double tol = 1e-6) const;
    IndexList supportY(double tol = 1e-6) const;
    Vector fSum() const { return sideX.stacked * coeffs.zx; }
    Vector gSum() const { return sideY.stacked * coeffs.zy; }
};

KccaModel fitSaKcca(const PairedDataset& data, const KccaHyper& hyper,
                    const KccaCoefficients* init = nullptr, int workers = 1);

KccaModel fitSaKccaOnSides(KccaSide sideX, KccaSide sideY, const KccaHyper& hyper,
                           const KccaCoefficients* init = nullptr);

struct KccaEvalResult {
    Vector fValues, gValues;
    double correlation = 0;
};

KccaEvalResult evaluateKcca(const KccaModel& model, const PairedDataset& newData);

}  // namespace sacca
