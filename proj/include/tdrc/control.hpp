#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdrc/agents.hpp"
#include "tdrc/optimizers.hpp"
#include "tdrc/rng.hpp"
#include "tdrc/types.hpp"

namespace tdrc::control {

enum class Method { qlearning, qc, qrc, ac_td, ac_tdc, ac_tdrc };

Method parse_method(std::string_view name);
std::string to_string(Method m);
bool is_actor_critic(Method m);

// Binary state features given as active indices. Action-value features are
// the state features placed in the block of the chosen action.
struct SparseTransition {
    std::span<const int> active;
    int action = 0;
    double reward = 0.0;
    double gamma = 0.0;
    std::span<const int> next_active;
};

struct ControlHyper {
    double alpha = 0.01;
    double eta = 1.0;
    double beta = 1.0;
};

// Raw dense (delta_w, delta_h) for Q-learning / QC / QRC. Vectors have length
// n_actions * n_state_features; bootstrap action is the lowest-index argmax.
agents::Update q_update(Method variant, const Vec& w, const Vec& h, int n_state_features, int n_actions,
                        const SparseTransition& t, double beta);

// Sparse constant-stepsize implementation of q_update; equal to applying
// w += alpha * dw and h += eta * alpha * dh.
class LinearQ {
public:
    LinearQ(Method variant, int n_state_features, int n_actions, ControlHyper hyper);

    double value(std::span<const int> active, int a) const;
    int greedy(std::span<const int> active) const;
    // Explores with probability epsilon; ties among maximizers broken uniformly.
    int act(std::span<const int> active, double epsilon, Rng& rng) const;
    void update(const SparseTransition& t);

    const Vec& w() const { return w_; }
    const Vec& h() const { return h_; }
    bool diverged() const { return diverged_; }

private:
    Method variant_;
    int n_features_;
    int n_actions_;
    ControlHyper hyper_;
    Vec w_;
    Vec h_;
    bool diverged_ = false;
};

// Linear softmax preferences theta[a * n + i]; gradient of ln pi(a|s).
Vec softmax_policy(const Vec& theta, std::span<const int> active, int n_state_features, int n_actions);
Vec log_policy_gradient(const Vec& theta, std::span<const int> active, int action, int n_state_features,
                        int n_actions);

// One-step actor-critic with a TDRC-family critic on the state features.
class ActorCritic {
public:
    ActorCritic(Method variant, int n_state_features, int n_actions, ControlHyper hyper,
                optim::OptimizerConfig optimizer);

    Vec policy(std::span<const int> active) const;
    int act(std::span<const int> active, Rng& rng) const;
    void update(const SparseTransition& t);

    const Vec& theta() const { return theta_; }
    const agents::PredictionAgent& critic() const { return critic_; }
    bool diverged() const { return critic_.diverged(); }

private:
    Vec dense(std::span<const int> active) const;

    int n_features_;
    int n_actions_;
    agents::PredictionAgent critic_;
    Vec theta_;
    optim::Optimizer opt_theta_;
    Transition scratch_;
};

}  // namespace tdrc::control
