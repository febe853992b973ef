#include "sacca/io.hpp"

#include "sacca/smoothing.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace sacca {

using nlohmann::json;

std::string formatG(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string configHash(const std::string& canonical) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TsvWriter::TsvWriter(std::string path) : path_(std::move(path)) {}

void TsvWriter::comment(const std::string& line) { buffer_ += "# " + line + "\n"; }

void TsvWriter::header(const std::vector<std::string>& names) { row(names); }

void TsvWriter::row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) buffer_ += '\t';
        buffer_ += cells[i];
    }
    buffer_ += '\n';
}

void TsvWriter::close() {
    if (closed_) return;
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path_);
    out << buffer_;
    closed_ = true;
}

namespace {

json vectorToJson(const Vector& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vector vectorFromJson(const json& arr) {
    Vector v(arr.size());
    for (size_t i = 0; i < arr.size(); ++i) v[static_cast<long>(i)] = arr[i].get<double>();
    return v;
}

json matrixToJson(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) rows.push_back(vectorToJson(m.row(i)));
    return rows;
}

Matrix matrixFromJson(const json& rows) {
    if (rows.empty()) return Matrix(0, 0);
    Matrix m(rows.size(), rows[0].size());
    for (size_t i = 0; i < rows.size(); ++i)
        m.row(static_cast<long>(i)) = vectorFromJson(rows[i]).transpose();
    return m;
}

json tablesToJson(const std::vector<FunctionTable>& tables) {
    json arr = json::array();
    for (const FunctionTable& t : tables)
        arr.push_back({{"design", vectorToJson(t.design)}, {"values", vectorToJson(t.values)}});
    return arr;
}

std::vector<FunctionTable> tablesFromJson(const json& arr) {
    std::vector<FunctionTable> tables;
    for (const json& t : arr)
        tables.push_back({vectorFromJson(t.at("design")), vectorFromJson(t.at("values"))});
    return tables;
}

}  // namespace

ModelArtifact artifactFromFcca(const FccaModel& model, const IndexList& selectedX,
                               const IndexList& selectedY, int p1, int p2) {
    ModelArtifact a;
    a.method = "fcca";
    a.hyper = {{"cf", model.hyper.cf}, {"cg", model.hyper.cg}};
    a.f.resize(p1);
    a.g.resize(p2);
    a.fNorms = Vector::Zero(p1);
    a.gNorms = Vector::Zero(p2);
    for (size_t l = 0; l < selectedX.size(); ++l) {
        a.f[selectedX[l]] = {model.designX.col(static_cast<long>(l)),
                            model.f.values.row(static_cast<long>(l)).transpose()};
        a.fNorms[selectedX[l]] = model.f.groupNorms[static_cast<long>(l)];
    }
    for (size_t l = 0; l < selectedY.size(); ++l) {
        a.g[selectedY[l]] = {model.designY.col(static_cast<long>(l)),
                            model.g.values.row(static_cast<long>(l)).transpose()};
        a.gNorms[selectedY[l]] = model.g.groupNorms[static_cast<long>(l)];
    }
    for (int j : model.f.support()) a.supportX.push_back(selectedX[j]);
    for (int k : model.g.support()) a.supportY.push_back(selectedY[k]);
    a.objective = model.objective;
    a.version = kVersion;
    return a;
}

ModelArtifact artifactFromKcca(const KccaModel& model, const IndexList& selectedX,
                               const IndexList& selectedY, int p1, int p2) {
    ModelArtifact a;
    a.method = "kcca";
    a.hyper = {{"cf", model.hyper.cf},
               {"cg", model.hyper.cg},
               {"gammaF", model.hyper.gammaF},
               {"gammaG", model.hyper.gammaG}};
    a.f.resize(p1);
    a.g.resize(p2);
    a.fNorms = Vector::Zero(p1);
    a.gNorms = Vector::Zero(p2);
    for (int j = 0; j < model.sideX.covariates(); ++j) {
        Vector z = model.coeffs.blockX(model.sideX, j);
        a.f[selectedX[j]] = {model.sideX.grams[j].design, model.sideX.bases[j].b * z};
        a.fNorms[selectedX[j]] = model.fNorms[j];
    }
    for (int k = 0; k < model.sideY.covariates(); ++k) {
        Vector z = model.coeffs.blockY(model.sideY, k);
        a.g[selectedY[k]] = {model.sideY.grams[k].design, model.sideY.bases[k].b * z};
        a.gNorms[selectedY[k]] = model.gNorms[k];
    }
    for (int j : model.supportX()) a.supportX.push_back(selectedX[j]);
    for (int k : model.supportY()) a.supportY.push_back(selectedY[k]);
    a.objective = model.objective;
    a.version = kVersion;
    return a;
}

ModelArtifact artifactFromLinear(const LinearCcaSolution& sol, const PairedDataset& data,
                                 const std::string& method) {
    ModelArtifact a;
    a.method = method;
    a.f.resize(data.p1());
    a.g.resize(data.p2());
    a.fNorms = Vector::Zero(data.p1());
    a.gNorms = Vector::Zero(data.p2());
    const double n = data.n();
    for (int j = 0; j < data.p1(); ++j) {
        if (std::abs(sol.u[j]) <= 1e-12) continue;
        Vector vals = data.x.col(j) * sol.u[j];
        a.f[j] = {data.x.col(j), vals};
        a.fNorms[j] = std::sqrt(vals.squaredNorm() / n);
        a.supportX.push_back(j);
    }
    for (int k = 0; k < data.p2(); ++k) {
        if (std::abs(sol.v[k]) <= 1e-12) continue;
        Vector vals = data.y.col(k) * sol.v[k];
        a.g[k] = {data.y.col(k), vals};
        a.gNorms[k] = std::sqrt(vals.squaredNorm() / n);
        a.supportY.push_back(k);
    }
    a.objective = (data.x * sol.u).dot(data.y * sol.v) / n;
    a.version = kVersion;
    return a;
}

ModelArtifact artifactFromFullKcca(const FullKccaModel& model) {
    ModelArtifact a;
    a.method = "kcca-full";
    a.hyper = {{"bwX", model.bwX}, {"bwY", model.bwY}};
    a.wholeRow = true;
    a.fullModel = model;
    PairedDataset train;
    train.x = model.trainX;
    train.y = model.trainY;
    BaselineEval self = evaluateFullKcca(model, train);
    a.objective = self.fValues.dot(self.gValues) / model.trainX.rows();
    a.version = kVersion;
    return a;
}

void saveArtifact(const ModelArtifact& a, const std::string& path) {
    json j;
    j["method"] = a.method;
    j["hyper"] = a.hyper;
    j["objective"] = a.objective;
    j["provenance"] = {{"seed", a.seed}, {"config", a.config}, {"version", a.version}};
    j["supportX"] = a.supportX;
    j["supportY"] = a.supportY;
    if (a.wholeRow) {
        j["wholeRow"] = {{"alpha", vectorToJson(a.fullModel.alpha)},
                         {"beta", vectorToJson(a.fullModel.beta)},
                         {"trainX", matrixToJson(a.fullModel.trainX)},
                         {"trainY", matrixToJson(a.fullModel.trainY)},
                         {"bwX", a.fullModel.bwX},
                         {"bwY", a.fullModel.bwY},
                         {"rowMeanX", vectorToJson(a.fullModel.rowMeanX)},
                         {"rowMeanY", vectorToJson(a.fullModel.rowMeanY)},
                         {"grandMeanX", a.fullModel.grandMeanX},
                         {"grandMeanY", a.fullModel.grandMeanY}};
    } else {
        j["f"] = tablesToJson(a.f);
        j["g"] = tablesToJson(a.g);
        j["fNorms"] = vectorToJson(a.fNorms);
        j["gNorms"] = vectorToJson(a.gNorms);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << "\n";
}

ModelArtifact loadArtifact(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad artifact json: ") + e.what());
    }
    ModelArtifact a;
    try {
        a.method = j.at("method").get<std::string>();
        a.hyper = j.at("hyper").get<std::map<std::string, double>>();
        a.objective = j.at("objective").get<double>();
        const json& prov = j.at("provenance");
        a.seed = prov.at("seed").get<std::uint64_t>();
        a.config = prov.at("config").get<std::string>();
        a.version = prov.at("version").get<std::string>();
        a.supportX = j.at("supportX").get<IndexList>();
        a.supportY = j.at("supportY").get<IndexList>();
        if (j.contains("wholeRow")) {
            a.wholeRow = true;
            const json& w = j["wholeRow"];
            a.fullModel.alpha = vectorFromJson(w.at("alpha"));
            a.fullModel.beta = vectorFromJson(w.at("beta"));
            a.fullModel.trainX = matrixFromJson(w.at("trainX"));
            a.fullModel.trainY = matrixFromJson(w.at("trainY"));
            a.fullModel.bwX = w.at("bwX").get<double>();
            a.fullModel.bwY = w.at("bwY").get<double>();
            a.fullModel.rowMeanX = vectorFromJson(w.at("rowMeanX"));
            a.fullModel.rowMeanY = vectorFromJson(w.at("rowMeanY"));
            a.fullModel.grandMeanX = w.at("grandMeanX").get<double>();
            a.fullModel.grandMeanY = w.at("grandMeanY").get<double>();
        } else {
            a.f = tablesFromJson(j.at("f"));
            a.g = tablesFromJson(j.at("g"));
            a.fNorms = vectorFromJson(j.at("fNorms"));
            a.gNorms = vectorFromJson(j.at("gNorms"));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad artifact json: ") + e.what());
    }
    return a;
}

ArtifactEval evaluateArtifact(const ModelArtifact& a, const PairedDataset& data) {
    ArtifactEval r;
    const int n = data.n();
    if (a.wholeRow) {
        BaselineEval ev = evaluateFullKcca(a.fullModel, data);
        r.fValues = ev.fValues;
        r.gValues = ev.gValues;
        r.correlation = ev.correlation;
        r.objective = r.fValues.dot(r.gValues) / n;
        return r;
    }
    if (static_cast<int>(a.f.size()) != data.p1() ||
        static_cast<int>(a.g.size()) != data.p2())
        throw DimensionMismatch(static_cast<int>(a.f.size()), data.p1());
    r.fValues = Vector::Zero(n);
    r.gValues = Vector::Zero(n);
    for (int j = 0; j < data.p1(); ++j)
        if (a.f[j].design.size() > 0)
            r.fValues += extendFit(a.f[j].design, a.f[j].values, data.x.col(j));
    for (int k = 0; k < data.p2(); ++k)
        if (a.g[k].design.size() > 0)
            r.gValues += extendFit(a.g[k].design, a.g[k].values, data.y.col(k));
    r.correlation = pearson(r.fValues, r.gValues);
    r.objective = r.fValues.dot(r.gValues) / n;
    return r;
}

}  // namespace sacca
