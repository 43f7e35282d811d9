#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tdrc/mdp.hpp"

namespace tdrc::metrics {

double mspbe(const Vec& w, const mdp::ExpectationModel& model);
double rmspbe(const Vec& w, const mdp::ExpectationModel& model);
// Same objective with C replaced by C + beta I.
double mspbe_pp(const Vec& w, const mdp::ExpectationModel& model, double beta);

// Precomputes L*A and L*b so RMSPBE costs one small mat-vec per call.
class RmspbeEvaluator {
public:
    explicit RmspbeEvaluator(const mdp::ExpectationModel& model);
    double operator()(const Vec& w) const;

private:
    Mat la_;
    Vec lb_;
    mutable Vec scratch_;
};

struct RunResult {
    std::string environment;
    std::string algorithm;
    std::string optimizer;
    double alpha = 0.0;
    double eta = 0.0;
    double beta = 0.0;
    std::uint64_t seed = 0;
    int run = 0;
    std::vector<double> curve;
    int curve_stride = 1;  // environment steps between curve entries
    bool diverged = false;
    double auc = 0.0;
};

// Mean of the curve; NaN for an empty curve.
double auc(std::span<const double> curve);

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;  // sample (n - 1) deviation, NaN when n < 2
    double stderr_ = 0.0;
    int n = 0;
};

Stats describe(std::span<const double> values);

struct ConfigSummary {
    std::string environment;
    std::string algorithm;
    std::string optimizer;
    double alpha = 0.0;
    double eta = 0.0;
    double beta = 0.0;
    Stats auc;
    std::vector<double> mean_curve;
    int diverged_runs = 0;
    double normalized = 0.0;  // mean AUC / baseline AUC, NaN without a baseline
};

struct SweepSummary {
    std::vector<ConfigSummary> configs;
    // Index into configs of the best (lowest mean AUC, ties to smaller alpha)
    // per (environment, algorithm).
    std::map<std::pair<std::string, std::string>, std::size_t> best;
    // Best TDRC mean AUC per environment, used for normalization when present.
    std::map<std::string, double> baseline;
};

// Groups runs by (environment, algorithm, optimizer, alpha, eta, beta).
// Throws std::invalid_argument on empty input.
SweepSummary aggregate(std::span<const RunResult> results);

// Best configuration among `configs` by mean AUC, ties toward smaller alpha.
std::size_t select_best(std::span<const ConfigSummary> configs);

// (mean TDRC AUC - mean TD AUC) / stddev(TD AUC); NaN if the TD spread is 0.
double reward_scale_score(std::span<const double> tdrc_aucs, std::span<const double> td_aucs);

}  // namespace tdrc::metrics
