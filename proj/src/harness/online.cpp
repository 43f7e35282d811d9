#include <stdexcept>

#include "tdrc/harness.hpp"

namespace tdrc::harness {

PredictionSetup make_setup(const std::string& environment, double reward_scale,
                           const std::optional<std::vector<double>>& initial_w) {
    PredictionSetup s{env::make_problem(environment, reward_scale), {}, {}};
    s.model = mdp::expectation_matrices(s.problem.mdp, s.problem.behavior, s.problem.target, s.problem.features);
    s.w0 = s.problem.w0;
    if (initial_w) {
        if (static_cast<Eigen::Index>(initial_w->size()) != s.w0.size())
            throw std::invalid_argument("initial_w length does not match the feature dimension of " + environment);
        s.w0 = Eigen::Map<const Vec>(initial_w->data(), static_cast<Eigen::Index>(initial_w->size()));
    }
    return s;
}

metrics::RunResult run_online_single(const PredictionSetup& setup, const env::TransitionTable& table,
                                     agents::Algorithm alg, const agents::Hyper& hyper,
                                     const optim::OptimizerConfig& opt, int n_steps, std::uint64_t seed_base,
                                     int run) {
    const std::uint64_t key = run_key(seed_base, run);
    env::TrajectoryStream stream(table, setup.problem.mdp.start_dist, Rng(key));
    agents::PredictionAgent agent(alg, hyper, opt, setup.w0);
    metrics::RmspbeEvaluator eval(setup.model);

    metrics::RunResult r;
    r.environment = setup.problem.name;
    r.algorithm = agents::to_string(alg);
    r.optimizer = optim::to_string(opt.kind);
    r.alpha = hyper.alpha;
    r.eta = hyper.eta;
    r.beta = hyper.beta;
    r.seed = key;
    r.run = run;
    r.curve.resize(n_steps);
    for (int t = 0; t < n_steps; ++t) {
        r.curve[t] = eval(agent.w());
        agent.update(stream.next());
    }
    r.diverged = agent.diverged();
    r.auc = metrics::auc(r.curve);
    return r;
}

std::vector<metrics::RunResult> run_online(const ExperimentConfig& c) {
    validate(c);
    struct Task {
        std::size_t env;
        agents::Algorithm alg;
        HyperPoint hp;
        int run;
    };
    std::vector<PredictionSetup> setups;
    std::vector<std::unique_ptr<env::TransitionTable>> tables;
    for (const auto& e : c.environments) {
        setups.push_back(make_setup(e, c.reward_scale, c.initial_w));
        tables.push_back(std::make_unique<env::TransitionTable>(setups.back().problem));
    }
    std::vector<Task> tasks;
    for (std::size_t e = 0; e < setups.size(); ++e)
        for (const auto& name : c.algorithms)
            for (const auto& hp : hyper_grid(c, name))
                for (int run = 0; run < c.n_runs; ++run) tasks.push_back({e, agents::parse_algorithm(name), hp, run});

    std::vector<metrics::RunResult> out(tasks.size());
    parallel_for(tasks.size(), worker_count(c.workers), [&](std::size_t i) {
        const Task& t = tasks[i];
        agents::Hyper hyper{t.hp.alpha, t.hp.eta, t.hp.beta, c.clip};
        out[i] = run_online_single(setups[t.env], *tables[t.env], t.alg, hyper, c.optimizer, c.n_steps, c.seed_base,
                                   t.run);
        if (!c.keep_curves) {
            out[i].curve.clear();
            out[i].curve.shrink_to_fit();
        }
    });
    return out;
}

}  // namespace tdrc::harness
