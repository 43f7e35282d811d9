#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tdrc/mdp.hpp"
#include "tdrc/rng.hpp"

namespace tdrc::env {

enum class RandomWalkFeatures { tabular, inverted, dependent };

// A finite prediction benchmark: dynamics, features, both policies and the
// conventional initial primary weights.
struct Problem {
    std::string name;
    mdp::MdpSpec mdp;
    mdp::FeatureMap features;
    mdp::Policy behavior;
    mdp::Policy target;
    Vec w0;
};

Problem make_boyan();
Problem make_baird();
Problem make_random_walk(RandomWalkFeatures features, double reward_scale = 1.0, double target_right = 0.6);

RandomWalkFeatures parse_random_walk_features(std::string_view name);

// CLI names: boyan, baird, randomwalk-tabular, randomwalk-inverted, randomwalk-dependent.
Problem make_problem(std::string_view name, double reward_scale = 1.0);
const std::vector<std::string>& prediction_problem_names();

// Every (s, a, s') with positive probability, pre-expanded into transitions
// so samplers hand out references instead of rebuilding feature vectors.
class TransitionTable {
public:
    explicit TransitionTable(const Problem& problem);

    const Transition& at(int s, int a, int sp) const { return table_[index(s, a, sp)]; }

    // Samples a ~ behavior(s), s' ~ P(s, a, .) and returns the transition.
    const Transition& sample(int s, Rng& rng) const;

    int n_states() const { return n_states_; }

private:
    std::size_t index(int s, int a, int sp) const {
        return (static_cast<std::size_t>(s) * n_actions_ + a) * n_states_ + sp;
    }

    int n_states_;
    int n_actions_;
    std::vector<Transition> table_;
    std::vector<double> transition_;  // copy of P, [s][a][s']
    std::vector<double> behavior_;    // [s][a]
};

// Follows the behavior policy from a start_dist state. The table must
// outlive the stream.
class TrajectoryStream {
public:
    TrajectoryStream(const TransitionTable& table, const Vec& start_dist, Rng rng);

    const Transition& next();
    int state() const { return state_; }

private:
    const TransitionTable& table_;
    Rng rng_;
    int state_;
};

// Draws s ~ d, then a ~ behavior, s' ~ P: independent samples for the batch protocol.
const Transition& sample_independent(const TransitionTable& table, const Vec& d, Rng& rng);

}  // namespace tdrc::env
