#include <algorithm>
#include <limits>

#include "tdrc/harness.hpp"

namespace tdrc::harness {

BatchResult run_batch(const ExperimentConfig& c) {
    validate(c);
    std::vector<int> budgets = c.update_budgets;
    std::sort(budgets.begin(), budgets.end());
    const int max_budget = budgets.back();

    struct Combo {
        agents::Algorithm alg;
        std::string name;
        HyperPoint hp;
    };
    std::vector<Combo> combos;
    for (const auto& name : c.algorithms)
        for (const auto& hp : hyper_grid(c, name)) combos.push_back({agents::parse_algorithm(name), name, hp});

    BatchResult result;
    for (const auto& environment : c.environments) {
        PredictionSetup setup = make_setup(environment, c.reward_scale, c.initial_w);
        env::TransitionTable table(setup.problem);

        // prefix_auc[run][combo][budget index]
        std::vector<std::vector<std::vector<double>>> prefix(
            c.n_runs, std::vector<std::vector<double>>(combos.size(), std::vector<double>(budgets.size())));
        std::vector<metrics::RunResult> runs(static_cast<std::size_t>(c.n_runs) * combos.size());

        parallel_for(c.n_runs, worker_count(c.workers), [&](std::size_t run) {
            Rng data_rng(run_key(c.seed_base, static_cast<int>(run), 1));
            std::vector<const Transition*> dataset(c.dataset_size);
            for (auto& t : dataset) t = &env::sample_independent(table, setup.model.d_b, data_rng);
            metrics::RmspbeEvaluator eval(setup.model);
            std::vector<const Transition*> batch(c.minibatch_size);

            for (std::size_t k = 0; k < combos.size(); ++k) {
                const Combo& combo = combos[k];
                Rng batch_rng(run_key(c.seed_base, static_cast<int>(run), 2));
                optim::OptimizerConfig opt = c.optimizer;
                agents::PredictionAgent agent(combo.alg, {combo.hp.alpha, combo.hp.eta, combo.hp.beta, c.clip}, opt,
                                              setup.w0);
                std::vector<double> curve(max_budget + 1);
                curve[0] = eval(agent.w());
                for (int n = 1; n <= max_budget; ++n) {
                    for (auto& t : batch) t = dataset[batch_rng.uniform_int(c.dataset_size)];
                    agent.update_batch(batch);
                    curve[n] = eval(agent.w());
                }
                double running = 0.0;
                std::size_t bi = 0;
                for (int n = 0; n <= max_budget && bi < budgets.size(); ++n) {
                    running += curve[n];
                    while (bi < budgets.size() && budgets[bi] == n) prefix[run][k][bi++] = running / (n + 1);
                }
                metrics::RunResult& r = runs[run * combos.size() + k];
                r.environment = setup.problem.name;
                r.algorithm = combo.name;
                r.optimizer = optim::to_string(opt.kind);
                r.alpha = combo.hp.alpha;
                r.eta = combo.hp.eta;
                r.beta = combo.hp.beta;
                r.seed = run_key(c.seed_base, static_cast<int>(run), 1);
                r.run = static_cast<int>(run);
                r.diverged = agent.diverged();
                r.auc = metrics::auc(curve);
                if (c.keep_curves) r.curve = std::move(curve);
            }
        });

        for (const auto& name : c.algorithms) {
            for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
                BatchPoint best;
                best.environment = setup.problem.name;
                best.algorithm = name;
                best.budget = budgets[bi];
                best.auc.mean = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < combos.size(); ++k) {
                    if (combos[k].name != name) continue;
                    std::vector<double> v(c.n_runs);
                    for (int run = 0; run < c.n_runs; ++run) v[run] = prefix[run][k][bi];
                    metrics::Stats s = metrics::describe(v);
                    if (s.mean < best.auc.mean || (s.mean == best.auc.mean && combos[k].hp.alpha < best.best_alpha)) {
                        best.auc = s;
                        best.best_alpha = combos[k].hp.alpha;
                    }
                }
                result.points.push_back(best);
            }
        }
        result.runs.insert(result.runs.end(), std::make_move_iterator(runs.begin()),
                           std::make_move_iterator(runs.end()));
    }
    return result;
}

int first_budget_within(const std::vector<BatchPoint>& points, const std::string& algorithm, double target,
                        double tol) {
    int best = -1;
    for (const auto& p : points) {
        if (p.algorithm != algorithm) continue;
        if (p.auc.mean <= (1.0 + tol) * target && (best < 0 || p.budget < best)) best = p.budget;
    }
    return best;
}

}  // namespace tdrc::harness
