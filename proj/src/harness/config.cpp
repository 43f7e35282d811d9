#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "tdrc/control.hpp"
#include "tdrc/harness.hpp"
#include "tdrc/rng.hpp"

namespace tdrc::harness {

using nlohmann::json;

Protocol parse_protocol(std::string_view name) {
    if (name == "online") return Protocol::online;
    if (name == "batch") return Protocol::batch;
    if (name == "reward-scale") return Protocol::reward_scale;
    if (name == "control") return Protocol::control;
    throw std::invalid_argument("unknown protocol: " + std::string(name));
}

std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::online: return "online";
        case Protocol::batch: return "batch";
        case Protocol::reward_scale: return "reward-scale";
        case Protocol::control: return "control";
    }
    return "?";
}

std::vector<double> powers_of_two(int lo, int hi, double scale) {
    std::vector<double> out;
    for (int k = lo; k <= hi; ++k) out.push_back(scale * std::ldexp(1.0, k));
    return out;
}

namespace {

template <class T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

const std::vector<std::string> kKnownKeys{
    "protocol", "environment", "environments", "algorithms", "optimizer", "alpha", "eta", "beta", "overrides",
    "clip", "n_runs", "n_steps", "seed_base", "output", "reward_scale", "initial_w", "dataset_size",
    "minibatch_size", "update_budgets", "reward_scales", "n_env_steps", "episode_cap", "epsilon", "gamma",
    "curve_stride", "tiles", "scale_alpha_by_tilings", "keep_curves", "workers"};

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), it.key()) == kKnownKeys.end())
            throw std::invalid_argument("unknown config key: " + it.key());

    ExperimentConfig c;
    if (j.contains("protocol")) c.protocol = parse_protocol(j.at("protocol").get<std::string>());
    if (c.protocol == Protocol::control) {
        c.environments = {"mountaincar"};
        c.algorithms = {"qlearning", "qc", "qrc"};
    }
    if (c.protocol == Protocol::reward_scale)
        c.environments = {"randomwalk-tabular", "randomwalk-inverted", "randomwalk-dependent"};
    if (c.protocol != Protocol::online) c.optimizer.kind = optim::Kind::constant;
    if (j.contains("environment")) c.environments = {j.at("environment").get<std::string>()};
    read_opt(j, "environments", c.environments);
    read_opt(j, "algorithms", c.algorithms);
    if (j.contains("optimizer")) {
        c.optimizer_explicit = true;
        const json& o = j.at("optimizer");
        if (o.is_string()) {
            c.optimizer.kind = optim::parse_kind(o.get<std::string>());
        } else {
            if (o.contains("kind")) c.optimizer.kind = optim::parse_kind(o.at("kind").get<std::string>());
            read_opt(o, "beta1", c.optimizer.beta1);
            read_opt(o, "beta2", c.optimizer.beta2);
            read_opt(o, "epsilon", c.optimizer.epsilon);
        }
    }
    read_opt(j, "alpha", c.alpha);
    read_opt(j, "eta", c.eta);
    read_opt(j, "beta", c.beta);
    if (j.contains("overrides")) {
        for (auto it = j.at("overrides").begin(); it != j.at("overrides").end(); ++it) {
            GridOverride g;
            read_opt(it.value(), "alpha", g.alpha);
            read_opt(it.value(), "eta", g.eta);
            read_opt(it.value(), "beta", g.beta);
            c.overrides[it.key()] = g;
        }
    }
    read_opt(j, "clip", c.clip);
    read_opt(j, "n_runs", c.n_runs);
    read_opt(j, "n_steps", c.n_steps);
    read_opt(j, "seed_base", c.seed_base);
    read_opt(j, "output", c.output);
    read_opt(j, "reward_scale", c.reward_scale);
    if (j.contains("initial_w")) c.initial_w = j.at("initial_w").get<std::vector<double>>();
    read_opt(j, "dataset_size", c.dataset_size);
    read_opt(j, "minibatch_size", c.minibatch_size);
    read_opt(j, "update_budgets", c.update_budgets);
    read_opt(j, "reward_scales", c.reward_scales);
    read_opt(j, "n_env_steps", c.n_env_steps);
    read_opt(j, "episode_cap", c.episode_cap);
    read_opt(j, "epsilon", c.epsilon);
    read_opt(j, "gamma", c.gamma);
    read_opt(j, "curve_stride", c.curve_stride);
    if (j.contains("tiles")) {
        env::TileCoderConfig t;
        const json& tj = j.at("tiles");
        read_opt(tj, "n_tilings", t.n_tilings);
        read_opt(tj, "tiles_per_dim", t.tiles_per_dim);
        if (tj.contains("state_bounds")) t.state_bounds = tj.at("state_bounds").get<std::vector<std::pair<double, double>>>();
        c.tiles = t;
    }
    read_opt(j, "scale_alpha_by_tilings", c.scale_alpha_by_tilings);
    read_opt(j, "keep_curves", c.keep_curves);
    read_opt(j, "workers", c.workers);
    if (c.update_budgets.empty() && c.protocol == Protocol::batch)
        for (int b = 1; b <= 8192; b *= 2) c.update_budgets.push_back(b);
    if (c.reward_scales.empty() && c.protocol == Protocol::reward_scale)
        c.reward_scales = {1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
    validate(c);
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["protocol"] = to_string(c.protocol);
    j["environments"] = c.environments;
    j["algorithms"] = c.algorithms;
    j["optimizer"] = {{"kind", optim::to_string(c.optimizer.kind)},
                      {"beta1", c.optimizer.beta1},
                      {"beta2", c.optimizer.beta2},
                      {"epsilon", c.optimizer.epsilon}};
    j["alpha"] = c.alpha;
    j["eta"] = c.eta;
    j["beta"] = c.beta;
    json ov = json::object();
    for (const auto& [name, g] : c.overrides) ov[name] = {{"alpha", g.alpha}, {"eta", g.eta}, {"beta", g.beta}};
    j["overrides"] = ov;
    j["clip"] = c.clip;
    j["n_runs"] = c.n_runs;
    j["n_steps"] = c.n_steps;
    j["seed_base"] = c.seed_base;
    j["output"] = c.output;
    j["reward_scale"] = c.reward_scale;
    if (c.initial_w) j["initial_w"] = *c.initial_w;
    j["dataset_size"] = c.dataset_size;
    j["minibatch_size"] = c.minibatch_size;
    j["update_budgets"] = c.update_budgets;
    j["reward_scales"] = c.reward_scales;
    j["n_env_steps"] = c.n_env_steps;
    j["episode_cap"] = c.episode_cap;
    j["epsilon"] = c.epsilon;
    j["gamma"] = c.gamma;
    j["curve_stride"] = c.curve_stride;
    if (c.tiles)
        j["tiles"] = {{"n_tilings", c.tiles->n_tilings},
                      {"tiles_per_dim", c.tiles->tiles_per_dim},
                      {"state_bounds", c.tiles->state_bounds}};
    j["scale_alpha_by_tilings"] = c.scale_alpha_by_tilings;
    j["keep_curves"] = c.keep_curves;
    return j;
}

std::string config_hash(const ExperimentConfig& c) {
    std::string text = config_to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& m) { throw std::invalid_argument("invalid config: " + m); };
    if (c.environments.empty()) fail("no environments");
    if (c.algorithms.empty()) fail("no algorithms");
    if (c.n_runs < 1) fail("n_runs must be at least 1");
    if (c.n_steps < 1) fail("n_steps must be at least 1");
    if (!(c.clip > 0.0)) fail("clip must be positive");
    for (double a : c.alpha)
        if (!(a > 0.0)) fail("alpha values must be positive");
    for (double e : c.eta)
        if (!(e >= 0.0)) fail("eta values must be non-negative");
    for (double b : c.beta)
        if (!(b >= 0.0)) fail("beta values must be non-negative");
    c.optimizer.validate();
    switch (c.protocol) {
        case Protocol::online:
        case Protocol::batch:
        case Protocol::reward_scale:
            for (const auto& e : c.environments) env::make_problem(e);
            for (const auto& a : c.algorithms) agents::parse_algorithm(a);
            break;
        case Protocol::control:
            for (const auto& e : c.environments)
                if (e != "mountaincar") fail("control protocol only supports mountaincar");
            for (const auto& a : c.algorithms) {
                auto m = control::parse_method(a);
                if (!control::is_actor_critic(m) && c.optimizer_explicit && c.optimizer.kind != optim::Kind::constant)
                    fail("Q-learning variants use a constant stepsize");
            }
            if (c.n_env_steps < 1) fail("n_env_steps must be at least 1");
            if (c.episode_cap < 1) fail("episode_cap must be at least 1");
            if (c.curve_stride < 1) fail("curve_stride must be at least 1");
            if (!(c.epsilon >= 0.0 && c.epsilon <= 1.0)) fail("epsilon outside [0,1]");
            if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) fail("gamma outside [0,1]");
            if (c.tiles) c.tiles->validate();
            break;
    }
    if (c.protocol == Protocol::batch) {
        if (c.dataset_size < 1) fail("dataset_size must be at least 1");
        if (c.minibatch_size < 1) fail("minibatch_size must be at least 1");
        if (c.update_budgets.empty()) fail("update_budgets empty");
        for (int b : c.update_budgets)
            if (b < 0) fail("update budgets must be non-negative");
        if (*std::max_element(c.update_budgets.begin(), c.update_budgets.end()) > 1000000)
            std::fprintf(stderr, "warning: update budget above 1e6 will be slow\n");
    }
    if (c.protocol == Protocol::reward_scale) {
        if (c.reward_scales.empty()) fail("reward_scales empty");
        for (const auto& e : c.environments)
            if (!e.starts_with("randomwalk-")) fail("reward-scale protocol needs random-walk environments");
    }
}

std::vector<HyperPoint> hyper_grid(const ExperimentConfig& c, const std::string& algorithm) {
    std::vector<double> alpha, eta{1.0}, beta{0.0};
    bool has_eta = false;
    bool has_beta = false;
    switch (c.protocol) {
        case Protocol::online: {
            auto alg = agents::parse_algorithm(algorithm);
            alpha = powers_of_two(-7, 0);
            has_eta = agents::uses_eta(alg);
            has_beta = agents::uses_beta(alg);
            if (alg == agents::Algorithm::tdc || alg == agents::Algorithm::htd || alg == agents::Algorithm::tdcpp)
                eta = powers_of_two(0, 6);
            if (alg == agents::Algorithm::gtd2) eta = powers_of_two(-6, 6);
            if (has_beta) beta = {1.0};
            break;
        }
        case Protocol::batch: {
            auto alg = agents::parse_algorithm(algorithm);
            alpha = powers_of_two(-5, 0);
            has_eta = agents::uses_eta(alg);
            has_beta = agents::uses_beta(alg);
            if (has_beta) beta = {1.0};
            break;
        }
        case Protocol::reward_scale: {
            auto alg = agents::parse_algorithm(algorithm);
            alpha = powers_of_two(-5, -1);
            has_eta = agents::uses_eta(alg);
            has_beta = agents::uses_beta(alg);
            if (has_beta) beta = powers_of_two(-5, 4);
            break;
        }
        case Protocol::control: {
            auto m = control::parse_method(algorithm);
            alpha = powers_of_two(-8, -1);
            has_eta = m != control::Method::qlearning && m != control::Method::ac_td;
            has_beta = m == control::Method::qrc || m == control::Method::ac_tdrc;
            if (has_beta) beta = {1.0};
            break;
        }
    }
    if (!has_eta) eta = {0.0};
    if (!c.alpha.empty()) alpha = c.alpha;
    if (has_eta && !c.eta.empty()) eta = c.eta;
    if (has_beta && !c.beta.empty()) beta = c.beta;
    if (auto it = c.overrides.find(algorithm); it != c.overrides.end()) {
        if (!it->second.alpha.empty()) alpha = it->second.alpha;
        if (has_eta && !it->second.eta.empty()) eta = it->second.eta;
        if (has_beta && !it->second.beta.empty()) beta = it->second.beta;
    }
    std::vector<HyperPoint> out;
    for (double a : alpha)
        for (double e : eta)
            for (double b : beta) out.push_back({a, e, b});
    return out;
}

optim::OptimizerConfig optimizer_for(const ExperimentConfig& c, const std::string& algorithm) {
    if (c.protocol != Protocol::control) return c.optimizer;
    auto m = control::parse_method(algorithm);
    if (!control::is_actor_critic(m)) return optim::OptimizerConfig{optim::Kind::constant};
    if (c.optimizer_explicit) return c.optimizer;
    return optim::OptimizerConfig{optim::Kind::adam, 0.01, 0.9, 0.999, 1e-8};
}

int worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TDRC_WORKERS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        for (int k = 0; k < workers; ++k)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= n) return;
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                        next.store(n);
                    }
                }
            });
    }
    if (error) std::rethrow_exception(error);
}

std::uint64_t run_key(std::uint64_t seed_base, int run, std::uint64_t purpose) {
    return stream_key(seed_base, static_cast<std::uint64_t>(run), purpose);
}

std::string output_dir(const ExperimentConfig& c) {
    if (const char* env = std::getenv("TDRC_OUTPUT_DIR"); env && *env) return env;
    return c.output;
}

}  // namespace tdrc::harness
