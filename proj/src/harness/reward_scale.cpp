#include <algorithm>
#include <limits>
#include <map>

#include "tdrc/harness.hpp"

namespace tdrc::harness {

namespace {

struct Best {
    double alpha = 0.0;
    metrics::Stats stats;
    std::vector<double> aucs;
};

// Lowest mean AUC over alpha (ties toward smaller alpha).
Best pick(const std::map<double, std::vector<double>>& by_alpha) {
    Best b;
    b.stats.mean = std::numeric_limits<double>::infinity();
    for (const auto& [alpha, aucs] : by_alpha) {
        metrics::Stats s = metrics::describe(aucs);
        if (s.mean < b.stats.mean) b = {alpha, s, aucs};
    }
    return b;
}

}  // namespace

std::vector<RewardScaleCell> run_reward_scale(const ExperimentConfig& c) {
    validate(c);
    ExperimentConfig grid_cfg = c;
    grid_cfg.protocol = Protocol::reward_scale;
    const auto td_grid = hyper_grid(grid_cfg, "td");
    const auto rc_grid = hyper_grid(grid_cfg, "tdrc");
    std::vector<double> betas;
    for (const auto& hp : rc_grid)
        if (std::find(betas.begin(), betas.end(), hp.beta) == betas.end()) betas.push_back(hp.beta);

    std::vector<RewardScaleCell> out;
    for (const auto& environment : c.environments) {
        for (double scale : c.reward_scales) {
            PredictionSetup setup = make_setup(environment, scale, c.initial_w);
            env::TransitionTable table(setup.problem);

            struct Task {
                agents::Algorithm alg;
                HyperPoint hp;
                int run;
            };
            std::vector<Task> tasks;
            for (const auto& hp : td_grid)
                for (int r = 0; r < c.n_runs; ++r) tasks.push_back({agents::Algorithm::td, hp, r});
            for (const auto& hp : rc_grid)
                for (int r = 0; r < c.n_runs; ++r) tasks.push_back({agents::Algorithm::tdrc, hp, r});
            std::vector<double> aucs(tasks.size());
            parallel_for(tasks.size(), worker_count(c.workers), [&](std::size_t i) {
                const Task& t = tasks[i];
                agents::Hyper hyper{t.hp.alpha, t.hp.eta, t.hp.beta, c.clip};
                aucs[i] = run_online_single(setup, table, t.alg, hyper, c.optimizer, c.n_steps, c.seed_base, t.run).auc;
            });

            std::map<double, std::vector<double>> td_by_alpha;
            std::map<double, std::map<double, std::vector<double>>> rc_by_beta;
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                if (tasks[i].alg == agents::Algorithm::td)
                    td_by_alpha[tasks[i].hp.alpha].push_back(aucs[i]);
                else
                    rc_by_beta[tasks[i].hp.beta][tasks[i].hp.alpha].push_back(aucs[i]);
            }
            Best td = pick(td_by_alpha);
            for (double beta : betas) {
                Best rc = pick(rc_by_beta[beta]);
                RewardScaleCell cell;
                cell.environment = environment;
                cell.scale = scale;
                cell.beta = beta;
                cell.td_alpha = td.alpha;
                cell.tdrc_alpha = rc.alpha;
                cell.td = td.stats;
                cell.tdrc = rc.stats;
                cell.score = metrics::reward_scale_score(rc.aucs, td.aucs);
                out.push_back(cell);
            }
        }
    }
    return out;
}

}  // namespace tdrc::harness
