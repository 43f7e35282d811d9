#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tdrc/harness.hpp"

namespace tdrc::harness {

using nlohmann::json;

json design_flags(const ExperimentConfig& c) {
    json f;
    f["episodic_encoding"] = "termination is gamma=0 on a transition into start_dist";
    f["state_weighting"] = "stationary distribution of the behavior chain with restarts";
    f["eta_placement"] = "eta scales the secondary optimizer stepsize after accumulation";
    f["adagrad"] = "accumulate squared update first, eps 1e-8 outside sqrt";
    f["adam"] = "bias-corrected, eps 1e-8";
    f["curve"] = "RMSPBE before every update, step 0 included; AUC is the curve mean";
    f["divergence"] = "update pushing a weight past 1e10 is discarded and weights freeze";
    f["singular_c"] = "MSPBE uses the pseudo-inverse of C";
    f["best_selection"] = "lowest mean AUC, ties to smaller alpha";
    f["baird_init"] = "w = (1,...,1,10), h = 0";
    f["baird_features"] = "upper states 2e_i + e_8, lower state e_7 + 2e_8";
    f["boyan"] = "13 states, skip 1 or 2 with p=.5, reward -3 (-2 on the last step), 4 interpolating features";
    f["random_walk"] = "5 states, start centre, +1 on right exit, 0 on left";
    f["rng"] = "counter-based splitmix64 streams keyed by (seed_base, run, purpose)";
    f["tdcpp_rho"] = "rho placement mirrors TDRC";
    f["htd"] = "hybrid TD with lambda=0; correction weighted by (rho - 1)";
    if (c.protocol == Protocol::batch) f["batch_eta"] = "eta = 1 for TDC, GTD2 and TDC++";
    if (c.protocol == Protocol::control) {
        f["tile_coder"] = "dense grid, tiling i shifted frac(i(2d+1)/n) tiles in dim d, edge cells clamped";
        f["control_stepsize"] = c.scale_alpha_by_tilings ? "alpha divided by number of tilings" : "alpha as given";
        f["control_curve"] = "steps-to-goal of the last finished episode every curve_stride steps";
        f["episode_cap"] = c.episode_cap;
        f["exploration"] = "epsilon-greedy, ties uniform; bootstrap action lowest-index argmax";
    }
    return f;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << std::setprecision(17);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

}  // namespace

void write_runs_csv(const std::string& path, const std::vector<metrics::RunResult>& runs, const std::string& hash) {
    auto out = open_out(path);
    if (!hash.empty()) out << "# config_hash=" << hash << "\n";
    out << "run_id,environment,algorithm,optimizer,alpha,eta,beta,seed,run,auc,diverged\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        out << i << ',' << r.environment << ',' << r.algorithm << ',' << r.optimizer << ',' << r.alpha << ','
            << r.eta << ',' << r.beta << ',' << r.seed << ',' << r.run << ',' << r.auc << ','
            << (r.diverged ? 1 : 0) << '\n';
    }
}

void write_curves_csv(const std::string& path, const std::vector<metrics::RunResult>& runs, const std::string& hash) {
    auto out = open_out(path);
    if (!hash.empty()) out << "# config_hash=" << hash << "\n";
    out << "run_id,step,value\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        for (std::size_t t = 0; t < r.curve.size(); ++t)
            out << i << ',' << (t + 1) * r.curve_stride - (r.curve_stride == 1 ? 1 : 0) << ',' << r.curve[t] << '\n';
    }
}

std::vector<metrics::RunResult> read_runs_csv(const std::string& runs_path, const std::string& curves_path) {
    std::ifstream in(runs_path);
    if (!in) throw std::runtime_error("cannot read " + runs_path);
    std::vector<metrics::RunResult> runs;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        auto f = split(line);
        if (f.size() != 11) throw std::runtime_error("malformed runs row: " + line);
        metrics::RunResult r;
        r.environment = f[1];
        r.algorithm = f[2];
        r.optimizer = f[3];
        r.alpha = std::stod(f[4]);
        r.eta = std::stod(f[5]);
        r.beta = std::stod(f[6]);
        r.seed = std::stoull(f[7]);
        r.run = std::stoi(f[8]);
        r.auc = std::stod(f[9]);
        r.diverged = f[10] == "1";
        std::size_t id = std::stoul(f[0]);
        if (id != runs.size()) throw std::runtime_error("run ids must be consecutive from 0");
        runs.push_back(std::move(r));
    }
    if (curves_path.empty()) return runs;
    std::ifstream cin(curves_path);
    if (!cin) throw std::runtime_error("cannot read " + curves_path);
    header = false;
    std::vector<std::vector<long>> steps(runs.size());
    while (std::getline(cin, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        auto f = split(line);
        if (f.size() != 3) throw std::runtime_error("malformed curve row: " + line);
        std::size_t id = std::stoul(f[0]);
        if (id >= runs.size()) throw std::runtime_error("curve row refers to unknown run");
        steps[id].push_back(std::stol(f[1]));
        runs[id].curve.push_back(std::stod(f[2]));
    }
    for (std::size_t i = 0; i < runs.size(); ++i)
        if (steps[i].size() >= 2) runs[i].curve_stride = static_cast<int>(steps[i][1] - steps[i][0]);
    return runs;
}

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json summary_json(const ExperimentConfig& c, const metrics::SweepSummary& s) {
    json j;
    j["config"] = config_to_json(c);
    j["config_hash"] = config_hash(c);
    j["design_flags"] = design_flags(c);
    json configs = json::array();
    for (const auto& cs : s.configs) {
        configs.push_back({{"environment", cs.environment},
                           {"algorithm", cs.algorithm},
                           {"optimizer", cs.optimizer},
                           {"alpha", cs.alpha},
                           {"eta", cs.eta},
                           {"beta", cs.beta},
                           {"mean_auc", number(cs.auc.mean)},
                           {"stderr", number(cs.auc.stderr_)},
                           {"n_runs", cs.auc.n},
                           {"diverged_runs", cs.diverged_runs},
                           {"normalized_by_tdrc", number(cs.normalized)}});
    }
    j["configs"] = configs;
    json best = json::array();
    for (const auto& [key, idx] : s.best)
        best.push_back({{"environment", key.first}, {"algorithm", key.second}, {"config_index", idx}});
    j["best"] = best;
    json base = json::object();
    for (const auto& [env, v] : s.baseline) base[env] = v;
    j["tdrc_baseline"] = base;
    return j;
}

void write_json(const std::string& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

std::string format_table(const metrics::SweepSummary& s) {
    std::vector<std::string> envs, algs;
    for (const auto& [key, idx] : s.best) {
        if (std::find(envs.begin(), envs.end(), key.first) == envs.end()) envs.push_back(key.first);
        if (std::find(algs.begin(), algs.end(), key.second) == algs.end()) algs.push_back(key.second);
    }
    std::ostringstream os;
    os << std::left << std::setw(10) << "algorithm";
    for (const auto& e : envs) os << std::setw(24) << e;
    os << '\n';
    for (const auto& a : algs) {
        os << std::setw(10) << a;
        for (const auto& e : envs) {
            auto it = s.best.find({e, a});
            if (it == s.best.end()) {
                os << std::setw(24) << "-";
                continue;
            }
            const auto& cs = s.configs[it->second];
            char buf[64];
            if (std::isnan(cs.auc.stderr_))
                std::snprintf(buf, sizeof buf, "%.3f", cs.auc.mean);
            else
                std::snprintf(buf, sizeof buf, "%.3f +- %.3f", cs.auc.mean, cs.auc.stderr_);
            os << std::setw(24) << buf;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace tdrc::harness
