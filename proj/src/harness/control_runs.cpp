#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <stdexcept>

#include "tdrc/control.hpp"
#include "tdrc/harness.hpp"
#include "tdrc/mountain_car.hpp"

namespace tdrc::harness {

namespace {

env::TileCoderConfig tiles_for(const ExperimentConfig& c, control::Method m) {
    if (c.tiles) return *c.tiles;
    env::TileCoderConfig t;
    t.n_tilings = control::is_actor_critic(m) ? 5 : 16;
    return t;
}

// Steps-to-goal tracker: curve entries hold the most recently completed
// episode length; entries before the first completion take its value.
class CurveRecorder {
public:
    CurveRecorder(long n_steps, int stride) : stride_(stride) { curve_.reserve(n_steps / stride + 1); }

    void episode_done(int length) {
        if (last_ < 0) first_ = length;
        last_ = length;
    }

    void tick(long step, int running_length) {
        if ((step + 1) % stride_ != 0) return;
        curve_.push_back(last_ >= 0 ? last_ : -1);
        pending_running_ = running_length;
    }

    std::vector<double> finish() {
        double fill = first_ >= 0 ? first_ : pending_running_;
        for (auto& v : curve_)
            if (v < 0) v = fill;
        return std::move(curve_);
    }

private:
    int stride_;
    std::vector<double> curve_;
    int last_ = -1;
    int first_ = -1;
    int pending_running_ = 0;
};

}  // namespace

ControlRun run_control_single(const ExperimentConfig& c, const std::string& method, const HyperPoint& hp, int run) {
    const control::Method m = control::parse_method(method);
    const env::TileCoder coder(tiles_for(c, m));
    const int nf = coder.dimension();
    const int na = env::mountain_car::kActions;
    const double alpha = c.scale_alpha_by_tilings ? hp.alpha / coder.config().n_tilings : hp.alpha;
    control::ControlHyper hyper{alpha, hp.eta, hp.beta};
    const optim::OptimizerConfig opt = optimizer_for(c, method);

    const std::uint64_t key = run_key(c.seed_base, run, 3);
    Rng rng(key);
    std::optional<control::LinearQ> q;
    std::optional<control::ActorCritic> ac;
    if (control::is_actor_critic(m))
        ac.emplace(m, nf, na, hyper, opt);
    else
        q.emplace(m, nf, na, hyper);

    auto choose = [&](std::span<const int> active) {
        return q ? q->act(active, c.epsilon, rng) : ac->act(active, rng);
    };

    ControlRun out;
    CurveRecorder rec(c.n_env_steps, c.curve_stride);
    env::MountainCarState s = env::mountain_car_reset(rng);
    std::vector<int> active, next_active;
    bool clamped = false;
    auto encode = [&](const env::MountainCarState& st, std::vector<int>& dst) {
        std::array<double, 2> v{st.position, st.velocity};
        bool cl = false;
        coder.active(v, dst, &cl);
        clamped = clamped || cl;
    };
    encode(s, active);
    int a = choose(active);
    int length = 0;
    for (long step = 0; step < c.n_env_steps; ++step) {
        env::MountainCarStep res = env::mountain_car_step(s, a);
        ++length;
        encode(res.state, next_active);
        control::SparseTransition t{active, a, res.reward, res.terminated ? 0.0 : c.gamma, next_active};
        if (q)
            q->update(t);
        else
            ac->update(t);
        if (res.terminated || length >= c.episode_cap) {
            out.episode_lengths.push_back(length);
            rec.episode_done(length);
            length = 0;
            s = env::mountain_car_reset(rng);
            encode(s, active);
        } else {
            s = res.state;
            std::swap(active, next_active);
        }
        rec.tick(step, length);
        a = choose(active);
    }

    metrics::RunResult& r = out.result;
    r.environment = "mountaincar";
    r.algorithm = method;
    r.optimizer = optim::to_string(opt.kind);
    r.alpha = hp.alpha;
    r.eta = hp.eta;
    r.beta = hp.beta;
    r.seed = key;
    r.run = run;
    r.curve = rec.finish();
    r.curve_stride = c.curve_stride;
    r.diverged = q ? q->diverged() : ac->diverged();
    r.auc = metrics::auc(r.curve);
    out.clamped = clamped;
    return out;
}

std::vector<ControlRun> run_control(const ExperimentConfig& c) {
    validate(c);
    struct Task {
        std::string method;
        HyperPoint hp;
        int run;
    };
    std::vector<Task> tasks;
    for (const auto& name : c.algorithms)
        for (const auto& hp : hyper_grid(c, name))
            for (int run = 0; run < c.n_runs; ++run) tasks.push_back({name, hp, run});
    std::vector<ControlRun> out(tasks.size());
    parallel_for(tasks.size(), worker_count(c.workers),
                 [&](std::size_t i) { out[i] = run_control_single(c, tasks[i].method, tasks[i].hp, tasks[i].run); });
    return out;
}

double final_performance(const metrics::RunResult& r, double fraction) {
    if (r.curve.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * r.curve.size()));
    double s = 0.0;
    for (std::size_t i = r.curve.size() - n; i < r.curve.size(); ++i) s += r.curve[i];
    return s / static_cast<double>(n);
}

}  // namespace tdrc::harness
