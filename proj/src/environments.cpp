#include "tdrc/environments.hpp"

#include <cmath>
#include <stdexcept>

namespace tdrc::env {

Problem make_boyan() {
    constexpr int n = 13;
    Problem p;
    p.name = "boyan";
    p.mdp = mdp::MdpSpec(n, 1);
    for (int s = 2; s < n; ++s) {
        for (int step : {1, 2}) {
            p.mdp.p(s, 0, s - step) = 0.5;
            p.mdp.r(s, 0, s - step) = -3.0;
            p.mdp.g(s, 0, s - step) = 1.0;
        }
    }
    p.mdp.p(1, 0, 0) = 1.0;
    p.mdp.r(1, 0, 0) = -2.0;
    p.mdp.g(1, 0, 0) = 1.0;
    // State 0 ends the episode and restarts at 12.
    p.mdp.p(0, 0, 12) = 1.0;
    p.mdp.start_dist(12) = 1.0;

    p.features.phi = Mat::Zero(n, 4);
    for (int s = 0; s < n; ++s)
        for (int k = 0; k < 4; ++k) {
            int corner = 12 - 4 * k;
            p.features.phi(s, k) = std::max(0.0, 1.0 - std::abs(s - corner) / 4.0);
        }
    p.behavior = mdp::Policy::uniform(n, 1);
    p.target = p.behavior;
    p.w0 = Vec::Zero(4);
    return p;
}

Problem make_baird() {
    constexpr int n = 7;
    constexpr int dashed = 0;
    constexpr int solid = 1;
    Problem p;
    p.name = "baird";
    p.mdp = mdp::MdpSpec(n, 2);
    for (int s = 0; s < n; ++s) {
        for (int sp = 0; sp < 6; ++sp) {
            p.mdp.p(s, dashed, sp) = 1.0 / 6.0;
            p.mdp.g(s, dashed, sp) = 0.99;
        }
        p.mdp.p(s, solid, 6) = 1.0;
        p.mdp.g(s, solid, 6) = 0.99;
    }
    p.mdp.start_dist = Vec::Constant(n, 1.0 / n);

    p.features.phi = Mat::Zero(n, 8);
    for (int s = 0; s < 6; ++s) {
        p.features.phi(s, s) = 2.0;
        p.features.phi(s, 7) = 1.0;
    }
    p.features.phi(6, 6) = 1.0;
    p.features.phi(6, 7) = 2.0;

    p.behavior.probs = Mat(n, 2);
    p.behavior.probs.col(dashed).setConstant(6.0 / 7.0);
    p.behavior.probs.col(solid).setConstant(1.0 / 7.0);
    p.target.probs = Mat::Zero(n, 2);
    p.target.probs.col(solid).setOnes();
    p.w0 = Vec::Ones(8);
    p.w0(7) = 10.0;
    return p;
}

Problem make_random_walk(RandomWalkFeatures features, double reward_scale, double target_right) {
    constexpr int n = 5;
    constexpr int start = 2;
    constexpr int left = 0;
    constexpr int right = 1;
    if (!(target_right >= 0.0 && target_right <= 1.0)) throw std::invalid_argument("target_right outside [0,1]");
    Problem p;
    p.mdp = mdp::MdpSpec(n, 2);
    for (int s = 0; s < n; ++s) {
        if (s > 0) {
            p.mdp.p(s, left, s - 1) = 1.0;
            p.mdp.g(s, left, s - 1) = 1.0;
        } else {
            p.mdp.p(s, left, start) = 1.0;
        }
        if (s < n - 1) {
            p.mdp.p(s, right, s + 1) = 1.0;
            p.mdp.g(s, right, s + 1) = 1.0;
        } else {
            p.mdp.p(s, right, start) = 1.0;
            p.mdp.r(s, right, start) = reward_scale;
        }
    }
    p.mdp.start_dist(start) = 1.0;
    p.behavior = mdp::Policy::uniform(n, 2);
    p.target.probs = Mat(n, 2);
    p.target.probs.col(left).setConstant(1.0 - target_right);
    p.target.probs.col(right).setConstant(target_right);

    switch (features) {
        case RandomWalkFeatures::tabular:
            p.name = "randomwalk-tabular";
            p.features.phi = Mat::Identity(n, n);
            break;
        case RandomWalkFeatures::inverted:
            p.name = "randomwalk-inverted";
            p.features.phi = Mat::Constant(n, n, 0.5);
            p.features.phi.diagonal().setZero();
            break;
        case RandomWalkFeatures::dependent: {
            p.name = "randomwalk-dependent";
            const double a = 1.0 / std::sqrt(2.0);
            const double b = 1.0 / std::sqrt(3.0);
            p.features.phi = Mat(n, 3);
            p.features.phi << 1, 0, 0,
                              a, a, 0,
                              b, b, b,
                              0, a, a,
                              0, 0, 1;
            break;
        }
    }
    p.w0 = Vec::Zero(p.features.n_features());
    return p;
}

RandomWalkFeatures parse_random_walk_features(std::string_view name) {
    if (name == "tabular") return RandomWalkFeatures::tabular;
    if (name == "inverted") return RandomWalkFeatures::inverted;
    if (name == "dependent") return RandomWalkFeatures::dependent;
    throw std::invalid_argument("unknown random-walk feature scheme: " + std::string(name));
}

Problem make_problem(std::string_view name, double reward_scale) {
    if (name == "boyan") return make_boyan();
    if (name == "baird") return make_baird();
    constexpr std::string_view prefix = "randomwalk-";
    if (name.starts_with(prefix))
        return make_random_walk(parse_random_walk_features(name.substr(prefix.size())), reward_scale);
    throw std::invalid_argument("unknown prediction environment: " + std::string(name));
}

const std::vector<std::string>& prediction_problem_names() {
    static const std::vector<std::string> names{"randomwalk-tabular", "randomwalk-inverted", "randomwalk-dependent",
                                                "boyan", "baird"};
    return names;
}

TransitionTable::TransitionTable(const Problem& problem)
    : n_states_(problem.mdp.n_states),
      n_actions_(problem.mdp.n_actions),
      table_(static_cast<std::size_t>(n_states_) * n_actions_ * n_states_),
      transition_(problem.mdp.transition),
      behavior_(static_cast<std::size_t>(n_states_) * n_actions_) {
    const auto& m = problem.mdp;
    for (int s = 0; s < n_states_; ++s)
        for (int a = 0; a < n_actions_; ++a) {
            double b = problem.behavior.probs(s, a);
            behavior_[static_cast<std::size_t>(s) * n_actions_ + a] = b;
            double rho = b > 0.0 ? problem.target.probs(s, a) / b : 0.0;
            for (int sp = 0; sp < n_states_; ++sp) {
                if (m.p(s, a, sp) == 0.0) continue;
                Transition& t = table_[index(s, a, sp)];
                t.x = problem.features.x(s);
                t.x_next = problem.features.x(sp);
                t.state = s;
                t.action = a;
                t.next_state = sp;
                t.reward = m.r(s, a, sp);
                t.gamma = m.g(s, a, sp);
                t.rho = rho;
            }
        }
}

const Transition& TransitionTable::sample(int s, Rng& rng) const {
    int a = rng.categorical(behavior_.data() + static_cast<std::size_t>(s) * n_actions_, n_actions_);
    int sp = rng.categorical(transition_.data() + index(s, a, 0), n_states_);
    return table_[index(s, a, sp)];
}

TrajectoryStream::TrajectoryStream(const TransitionTable& table, const Vec& start_dist, Rng rng)
    : table_(table), rng_(rng), state_(rng_.categorical(start_dist, static_cast<int>(start_dist.size()))) {}

const Transition& TrajectoryStream::next() {
    const Transition& t = table_.sample(state_, rng_);
    state_ = t.next_state;
    return t;
}

const Transition& sample_independent(const TransitionTable& table, const Vec& d, Rng& rng) {
    int s = rng.categorical(d, static_cast<int>(d.size()));
    return table.sample(s, rng);
}

}  // namespace tdrc::env
