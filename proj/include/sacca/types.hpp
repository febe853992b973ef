#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace sacca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexList = std::vector<int>;

// Root-mean-square norm, the group norm used throughout: sqrt((1/n) sum v_i^2).
inline double rmsNorm(const Vector& v) {
    if (v.size() == 0) return 0.0;
    return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

inline double pearson(const Vector& a, const Vector& b) {
    const auto n = a.size();
    if (n != b.size() || n < 2) return 0.0;
    Vector ac = a.array() - a.mean();
    Vector bc = b.array() - b.mean();
    double sa = ac.norm(), sb = bc.norm();
    if (sa < 1e-14 || sb < 1e-14) return 0.0;
    return ac.dot(bc) / (sa * sb);
}

}  // namespace sacca
