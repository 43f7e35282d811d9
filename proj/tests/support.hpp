#pragma once

#include <Eigen/Dense>

#include "tdrc/environments.hpp"
#include "tdrc/mdp.hpp"
#include "tdrc/rng.hpp"

namespace tdrc::testing {

// Random ergodic MDP with dense transitions, random policies and features.
inline env::Problem random_problem(std::uint64_t seed, int n_states = 6, int n_actions = 2, int n_features = 3,
                                   double gamma = 0.9) {
    Rng rng(stream_key(seed, 0xab));
    env::Problem p;
    p.name = "random";
    p.mdp = mdp::MdpSpec(n_states, n_actions);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) {
            double total = 0.0;
            for (int sp = 0; sp < n_states; ++sp) total += p.mdp.p(s, a, sp) = 0.05 + rng.uniform();
            for (int sp = 0; sp < n_states; ++sp) {
                p.mdp.p(s, a, sp) /= total;
                p.mdp.r(s, a, sp) = rng.uniform(-1.0, 1.0);
                p.mdp.g(s, a, sp) = gamma;
            }
        }
    p.mdp.start_dist = Vec::Constant(n_states, 1.0 / n_states);
    auto policy = [&] {
        mdp::Policy pi;
        pi.probs = Mat(n_states, n_actions);
        for (int s = 0; s < n_states; ++s) {
            for (int a = 0; a < n_actions; ++a) pi.probs(s, a) = 0.1 + rng.uniform();
            pi.probs.row(s) /= pi.probs.row(s).sum();
        }
        return pi;
    };
    p.behavior = policy();
    p.target = policy();
    p.features.phi = Mat(n_states, n_features);
    for (int s = 0; s < n_states; ++s)
        for (int k = 0; k < n_features; ++k) p.features.phi(s, k) = rng.normal();
    p.w0 = Vec::Zero(n_features);
    return p;
}

inline Vec random_vec(Rng& rng, int n, double scale = 1.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = scale * rng.normal();
    return v;
}

inline Mat random_mat(Rng& rng, int r, int c, double scale = 1.0) {
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = scale * rng.normal();
    return m;
}

// Stationary distribution by brute-force power iteration on the state chain.
inline Vec power_stationary(const env::Problem& p, int iters = 20000) {
    const int n = p.mdp.n_states;
    Mat P = Mat::Zero(n, n);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < p.mdp.n_actions; ++a)
            for (int sp = 0; sp < n; ++sp) P(s, sp) += p.behavior.probs(s, a) * p.mdp.p(s, a, sp);
    // Lazy chain avoids periodic oscillation.
    Mat L = 0.5 * (Mat::Identity(n, n) + P);
    Vec d = p.mdp.start_dist;
    for (int i = 0; i < iters; ++i) d = (d.transpose() * L).transpose();
    return d / d.sum();
}

// A, b, C accumulated transition by transition through the behavior policy
// with importance ratios.
struct DenseModel {
    Mat A;
    Vec b;
    Mat C;
};

inline DenseModel dense_model(const env::Problem& p, const Vec& d) {
    const int n = p.features.n_features();
    DenseModel m{Mat::Zero(n, n), Vec::Zero(n), Mat::Zero(n, n)};
    for (int s = 0; s < p.mdp.n_states; ++s) {
        Vec x = p.features.x(s);
        m.C += d(s) * x * x.transpose();
        for (int a = 0; a < p.mdp.n_actions; ++a) {
            double bp = p.behavior.probs(s, a);
            if (bp == 0.0) continue;
            double rho = p.target.probs(s, a) / bp;
            for (int sp = 0; sp < p.mdp.n_states; ++sp) {
                double w = d(s) * bp * p.mdp.p(s, a, sp) * rho;
                if (w == 0.0) continue;
                Vec xn = p.features.x(sp);
                m.A += w * x * (x - p.mdp.g(s, a, sp) * xn).transpose();
                m.b += w * p.mdp.r(s, a, sp) * x;
            }
        }
    }
    return m;
}

}  // namespace tdrc::testing
