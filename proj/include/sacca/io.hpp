#pragma once

#include "sacca/baselines.hpp"
#include "sacca/data.hpp"
#include "sacca/fcca.hpp"
#include "sacca/kcca.hpp"
#include "sacca/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sacca {

inline constexpr const char* kVersion = "0.1.0";

// Fixed 10-significant-digit rendering so identical runs give identical bytes.
std::string formatG(double v);

// FNV-1a over the canonical config string; rendered as 16 hex digits.
std::string configHash(const std::string& canonical);

struct TsvWriter {
    explicit TsvWriter(std::string path);
    void comment(const std::string& line);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);
    void close();

  private:
    std::string path_;
    std::string buffer_;
    bool closed_ = false;
};

// One covariate's fitted function as (design point, value) pairs; empty
// tables denote the zero function.
struct FunctionTable {
    Vector design, values;
};

struct ModelArtifact {
    std::string method;
    std::map<std::string, double> hyper;
    std::vector<FunctionTable> f, g;  // per covariate, full dimension
    Vector fNorms, gNorms;
    IndexList supportX, supportY;
    double objective = 0;
    std::uint64_t seed = 0;
    std::string config;   // config hash
    std::string version;

    // Whole-row kernel CCA carries its dual expansion instead of tables.
    bool wholeRow = false;
    FullKccaModel fullModel;
};

ModelArtifact artifactFromFcca(const FccaModel& model, const IndexList& selectedX,
                               const IndexList& selectedY, int p1, int p2);
ModelArtifact artifactFromKcca(const KccaModel& model, const IndexList& selectedX,
                               const IndexList& selectedY, int p1, int p2);
ModelArtifact artifactFromLinear(const LinearCcaSolution& sol, const PairedDataset& data,
                                 const std::string& method);
ModelArtifact artifactFromFullKcca(const FullKccaModel& model);

void saveArtifact(const ModelArtifact& artifact, const std::string& path);
ModelArtifact loadArtifact(const std::string& path);

struct ArtifactEval {
    Vector fValues, gValues;
    double correlation = 0;
    double objective = 0;  // (1/n) <f, g>
};

// Evaluates the stored per-covariate functions (piecewise-linear) on fresh
// data; at the training points this reproduces the fitted values exactly.
ArtifactEval evaluateArtifact(const ModelArtifact& artifact, const PairedDataset& data);

}  // namespace sacca
