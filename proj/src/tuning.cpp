#include "sacca/tuning.hpp"

#include "sacca/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace sacca {

TuneGrid defaultGrid(int p1, int p2) {
    TuneGrid grid;
    const double cMax = std::sqrt(static_cast<double>(std::min(p1, p2)));
    if (cMax <= 1.0) {
        grid.cValues = {1.0};
    } else {
        const int m = 8;
        for (int i = 0; i < m; ++i)
            grid.cValues.push_back(std::exp(std::log(cMax) * i / (m - 1)));
    }
    grid.gammaValues = {1e-3, 1e-2, 1e-1};
    grid.nPerms = 25;
    return grid;
}

namespace {

AdditiveFit permuteColumns(const AdditiveFit& fit, const IndexList& perm) {
    AdditiveFit out = fit;
    for (size_t i = 0; i < perm.size(); ++i)
        out.values.col(static_cast<long>(i)) = fit.values.col(perm[i]);
    out.recompute();
    return out;
}

KccaSide permuteSideRows(const KccaSide& side, const IndexList& perm) {
    KccaSide out = side;
    for (size_t i = 0; i < perm.size(); ++i) {
        out.stacked.row(static_cast<long>(i)) = side.stacked.row(perm[i]);
        for (size_t j = 0; j < side.bases.size(); ++j)
            out.bases[j].b.row(static_cast<long>(i)) = side.bases[j].b.row(perm[i]);
    }
    // crossGram is invariant under a row permutation of the bases.
    return out;
}

}  // namespace

TuneReport permutationTune(const TuneInputs& in, SolverMethod method, const TuneGrid& grid,
                           int workers) {
    const PairedDataset& data = *in.data;
    if (grid.cValues.empty()) throw ConfigError("empty tuning grid");

    std::vector<IndexList> perms(grid.nPerms);
    {
        std::mt19937_64 rng(grid.seed ^ 0x5851f42d4c957f2dull);
        for (auto& p : perms) {
            p.resize(data.n());
            std::iota(p.begin(), p.end(), 0);
            std::shuffle(p.begin(), p.end(), rng);
        }
    }

    std::vector<double> gammas =
        method == SolverMethod::kcca ? grid.gammaValues : std::vector<double>{0.0};
    if (gammas.empty()) gammas = {0.0};

    struct Job {
        double c, gamma;
        int perm;  // -1 for the real fit
    };
    std::vector<Job> jobs;
    for (double c : grid.cValues)
        for (double g : gammas) {
            jobs.push_back({c, g, -1});
            for (int b = 0; b < grid.nPerms; ++b) jobs.push_back({c, g, b});
        }

    std::vector<double> stats(jobs.size(), std::numeric_limits<double>::quiet_NaN());

    auto runFcca = [&](double c, int permIdx) -> double {
        FccaHyper hyper;
        hyper.cf = hyper.cg = c;
        hyper.tol = in.fccaTol;
        hyper.maxIter = in.fccaMaxIter;
        if (permIdx < 0) return fitFcca(data, hyper, *in.fccaInit).objective;
        PairedDataset permuted = data;
        permuted.y = selectRows(data.y, perms[permIdx]);
        AdditiveFit init = permuteColumns(*in.fccaInit, perms[permIdx]);
        return fitFcca(permuted, hyper, init).objective;
    };
    auto runKcca = [&](double c, double gamma, int permIdx) -> double {
        KccaHyper hyper;
        hyper.cf = hyper.cg = c;
        hyper.gammaF = hyper.gammaG = gamma;
        hyper.maxIter = in.kccaMaxIter;
        if (permIdx < 0)
            return fitSaKccaOnSides(*in.sideX, *in.sideY, hyper, in.kccaInit).objective;
        KccaSide sy = permuteSideRows(*in.sideY, perms[permIdx]);
        return fitSaKccaOnSides(*in.sideX, std::move(sy), hyper, in.kccaInit).objective;
    };

    parallelFor(static_cast<int>(jobs.size()), workers, [&](int i) {
        const Job& job = jobs[i];
        try {
            stats[i] = method == SolverMethod::fcca ? runFcca(job.c, job.perm)
                                                    : runKcca(job.c, job.gamma, job.perm);
        } catch (const Error&) {
            // failed replicates are dropped below
        }
    });

    TuneReport report;
    size_t cursor = 0;
    for (double c : grid.cValues)
        for (double g : gammas) {
            TunePoint pt;
            pt.c = c;
            pt.gamma = g;
            const double real = stats[cursor++];
            std::vector<double> permStats;
            for (int b = 0; b < grid.nPerms; ++b) {
                const double s = stats[cursor++];
                if (std::isfinite(s)) permStats.push_back(s);
            }
            pt.permsUsed = static_cast<int>(permStats.size());
            pt.valid = std::isfinite(real) &&
                       permStats.size() * 5 >= static_cast<size_t>(grid.nPerms) * 4;
            if (pt.valid) {
                pt.realStat = real;
                double mean = std::accumulate(permStats.begin(), permStats.end(), 0.0) /
                              permStats.size();
                double var = 0;
                for (double s : permStats) var += (s - mean) * (s - mean);
                var /= permStats.size();
                pt.permMean = mean;
                pt.permSd = std::sqrt(var);
                pt.zScore = (real - mean) / std::max(pt.permSd, 1e-12);
            }
            report.points.push_back(pt);
        }

    for (size_t i = 0; i < report.points.size(); ++i) {
        if (!report.points[i].valid) continue;
        if (report.chosen < 0 ||
            report.points[i].zScore > report.points[report.chosen].zScore)
            report.chosen = static_cast<int>(i);
    }
    if (report.chosen < 0) throw ConfigError("no valid tuning grid point");
    return report;
}

}  // namespace sacca
