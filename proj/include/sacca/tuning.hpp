#pragma once

#include "sacca/fcca.hpp"
#include "sacca/kcca.hpp"
#include "sacca/types.hpp"

#include <cstdint>
#include <vector>

namespace sacca {

enum class SolverMethod { fcca, kcca };

struct TuneGrid {
    std::vector<double> cValues;      // increasing, in [1, sqrt(p)]
    std::vector<double> gammaValues;  // kcca only; {0} placeholder for fcca
    int nPerms = 25;
    std::uint64_t seed = 0;
};

TuneGrid defaultGrid(int p1, int p2);

struct TunePoint {
    double c = 0;
    double gamma = 0;
    double realStat = 0;
    double permMean = 0;
    double permSd = 0;
    double zScore = 0;
    int permsUsed = 0;
    bool valid = true;
};

struct TuneReport {
    std::vector<TunePoint> points;
    int chosen = -1;  // index into points

    const TunePoint& best() const { return points[chosen]; }
};

// Tuning inputs: the standardized data plus the (non-sparse) initialization
// the sparse solver starts from; the same init, row-permuted along with Y,
// warm-starts the permuted refits.
struct TuneInputs {
    const PairedDataset* data = nullptr;
    const AdditiveFit* fccaInit = nullptr;          // fcca
    const KccaCoefficients* kccaInit = nullptr;     // kcca
    const KccaSide* sideX = nullptr;                // kcca, prebuilt sides
    const KccaSide* sideY = nullptr;
    double fccaTol = 1e-6;
    int fccaMaxIter = 60;
    int kccaMaxIter = 40;
};

TuneReport permutationTune(const TuneInputs& in, SolverMethod method, const TuneGrid& grid,
                           int workers = 1);

}  // namespace sacca
