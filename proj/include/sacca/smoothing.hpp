#pragma once

#include "sacca/errors.hpp"
#include "sacca/types.hpp"

#include <vector>

namespace sacca {

// Local-linear smoother matrix for one covariate. Row i holds the
// weighted-least-squares weights of a degree-1 local fit at design point i,
// so S 1 = 1 and S x = x exactly.
struct Smoother {
    Matrix s;
    Vector design;
    double bandwidth = 0;  // possibly inflated from the requested bandwidth
};

Smoother buildSmoother(const Vector& column, double bandwidth);

Vector smoothApply(const Matrix& s, const Vector& values);

// Evaluates the fit (design, fitted) at new points: piecewise-linear through
// the design points (duplicates averaged), linear continuation outside the
// hull. Interpolates the fitted values exactly at the design points.
Vector extendFit(const Vector& design, const Vector& fitted, const Vector& newPoints);

struct SmootherSet {
    std::vector<Smoother> smoothers;

    int count() const { return static_cast<int>(smoothers.size()); }
};

SmootherSet buildSmootherSet(const Matrix& data, const std::vector<double>& bandwidths,
                             int workers = 1);

}  // namespace sacca
