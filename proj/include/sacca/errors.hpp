#pragma once

#include <stdexcept>
#include <string>

namespace sacca {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConstantColumn : Error {
    int index;
    explicit ConstantColumn(int idx)
        : Error("constant column at index " + std::to_string(idx)), index(idx) {}
};

struct TooFewSamples : Error {
    explicit TooFewSamples(int n)
        : Error("need at least 4 samples, got " + std::to_string(n)) {}
};

struct NonpositiveBandwidth : Error {
    NonpositiveBandwidth() : Error("bandwidth must be positive") {}
};

struct DegenerateColumn : Error {
    DegenerateColumn() : Error("column has no two distinct values") {}
};

struct NotPositiveDefinite : Error {
    NotPositiveDefinite() : Error("metric matrix is not positive definite") {}
};

struct SingularLocalFit : Error {
    SingularLocalFit() : Error("local linear fit is singular after bandwidth inflation") {}
};

struct DimensionMismatch : Error {
    DimensionMismatch(long expected, long got)
        : Error("dimension mismatch: expected " + std::to_string(expected) +
                ", got " + std::to_string(got)) {}
};

struct AllSmoothedZero : Error {
    AllSmoothedZero() : Error("every smoothed component has zero norm") {}
};

struct ZeroTarget : Error {
    ZeroTarget() : Error("subproblem target vector is numerically zero") {}
};

struct EmptySelection : Error {
    EmptySelection() : Error("screening selected no covariates") {}
};

struct InvalidDelta : Error {
    InvalidDelta() : Error("delta must lie in (0, 1)") {}
};

struct CsvError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace sacca
