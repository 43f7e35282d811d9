#include "tdrc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace tdrc::metrics {

double mspbe(const Vec& w, const mdp::ExpectationModel& model) {
    Vec e = model.c_whitener * (model.b - model.A * w);
    return e.squaredNorm();
}

double rmspbe(const Vec& w, const mdp::ExpectationModel& model) { return std::sqrt(mspbe(w, model)); }

double mspbe_pp(const Vec& w, const mdp::ExpectationModel& model, double beta) {
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
    if (beta == 0.0) return mspbe(w, model);
    Vec r = model.b - model.A * w;
    Mat Cb = model.C + beta * Mat::Identity(model.n(), model.n());
    return r.dot(Cb.ldlt().solve(r));
}

RmspbeEvaluator::RmspbeEvaluator(const mdp::ExpectationModel& model)
    : la_(model.c_whitener * model.A), lb_(model.c_whitener * model.b), scratch_(lb_.size()) {}

double RmspbeEvaluator::operator()(const Vec& w) const {
    scratch_.noalias() = lb_;
    scratch_.noalias() -= la_ * w;
    return scratch_.norm();
}

double auc(std::span<const double> curve) {
    if (curve.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(curve.begin(), curve.end(), 0.0) / static_cast<double>(curve.size());
}

Stats describe(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("cannot describe an empty sample");
    Stats s;
    s.n = static_cast<int>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.n;
    if (s.n < 2) {
        s.stddev = std::numeric_limits<double>::quiet_NaN();
        s.stderr_ = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (s.n - 1));
    s.stderr_ = s.stddev / std::sqrt(static_cast<double>(s.n));
    return s;
}

std::size_t select_best(std::span<const ConfigSummary> configs) {
    if (configs.empty()) throw std::invalid_argument("no configurations to select from");
    std::size_t best = 0;
    for (std::size_t i = 1; i < configs.size(); ++i) {
        const auto& c = configs[i];
        const auto& b = configs[best];
        double cm = std::isnan(c.auc.mean) ? std::numeric_limits<double>::infinity() : c.auc.mean;
        double bm = std::isnan(b.auc.mean) ? std::numeric_limits<double>::infinity() : b.auc.mean;
        if (cm < bm || (cm == bm && c.alpha < b.alpha)) best = i;
    }
    return best;
}

SweepSummary aggregate(std::span<const RunResult> results) {
    if (results.empty()) throw std::invalid_argument("aggregate needs at least one run");
    using Key = std::tuple<std::string, std::string, std::string, double, double, double>;
    std::map<Key, std::vector<const RunResult*>> groups;
    for (const auto& r : results)
        groups[{r.environment, r.algorithm, r.optimizer, r.alpha, r.eta, r.beta}].push_back(&r);

    SweepSummary out;
    for (auto& [key, runs] : groups) {
        // Order by run index so the mean curve does not depend on input order.
        std::sort(runs.begin(), runs.end(), [](const RunResult* a, const RunResult* b) {
            return std::tie(a->run, a->seed) < std::tie(b->run, b->seed);
        });
        ConfigSummary c;
        std::tie(c.environment, c.algorithm, c.optimizer, c.alpha, c.eta, c.beta) = key;
        std::vector<double> aucs;
        std::size_t len = runs.front()->curve.size();
        for (const auto* r : runs) len = std::min(len, r->curve.size());
        c.mean_curve.assign(len, 0.0);
        for (const auto* r : runs) {
            aucs.push_back(r->auc);
            if (r->diverged) ++c.diverged_runs;
            for (std::size_t t = 0; t < len; ++t) c.mean_curve[t] += r->curve[t];
        }
        for (double& v : c.mean_curve) v /= static_cast<double>(runs.size());
        c.auc = describe(aucs);
        c.normalized = std::numeric_limits<double>::quiet_NaN();
        out.configs.push_back(std::move(c));
    }

    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> by_alg;
    for (std::size_t i = 0; i < out.configs.size(); ++i)
        by_alg[{out.configs[i].environment, out.configs[i].algorithm}].push_back(i);
    for (auto& [key, idx] : by_alg) {
        std::vector<ConfigSummary> subset;
        for (auto i : idx) subset.push_back(out.configs[i]);
        out.best[key] = idx[select_best(subset)];
        if (key.second == "tdrc") out.baseline[key.first] = out.configs[out.best[key]].auc.mean;
    }
    for (auto& c : out.configs) {
        auto it = out.baseline.find(c.environment);
        if (it != out.baseline.end()) c.normalized = c.auc.mean / it->second;
    }
    return out;
}

double reward_scale_score(std::span<const double> tdrc_aucs, std::span<const double> td_aucs) {
    if (tdrc_aucs.empty() || td_aucs.empty()) throw std::invalid_argument("reward_scale_score needs both samples");
    Stats td = describe(td_aucs);
    Stats rc = describe(tdrc_aucs);
    if (!(td.stddev > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return (rc.mean - td.mean) / td.stddev;
}

}  // namespace tdrc::metrics
