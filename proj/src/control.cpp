#include "tdrc/control.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tdrc::control {

Method parse_method(std::string_view name) {
    if (name == "qlearning") return Method::qlearning;
    if (name == "qc") return Method::qc;
    if (name == "qrc") return Method::qrc;
    if (name == "ac-td") return Method::ac_td;
    if (name == "ac-tdc") return Method::ac_tdc;
    if (name == "ac-tdrc") return Method::ac_tdrc;
    throw std::invalid_argument("unknown control method: " + std::string(name));
}

std::string to_string(Method m) {
    switch (m) {
        case Method::qlearning: return "qlearning";
        case Method::qc: return "qc";
        case Method::qrc: return "qrc";
        case Method::ac_td: return "ac-td";
        case Method::ac_tdc: return "ac-tdc";
        case Method::ac_tdrc: return "ac-tdrc";
    }
    return "?";
}

bool is_actor_critic(Method m) { return m == Method::ac_td || m == Method::ac_tdc || m == Method::ac_tdrc; }

namespace {

double block_sum(const Vec& v, std::span<const int> active, int offset) {
    double s = 0.0;
    for (int i : active) s += v[offset + i];
    return s;
}

int argmax_lowest(const Vec& w, std::span<const int> active, int nf, int na) {
    int best = 0;
    double best_q = block_sum(w, active, 0);
    for (int a = 1; a < na; ++a) {
        double q = block_sum(w, active, a * nf);
        if (q > best_q) {
            best_q = q;
            best = a;
        }
    }
    return best;
}

void check_q_variant(Method m) {
    if (is_actor_critic(m)) throw std::invalid_argument("actor-critic method passed to a Q-learning routine");
}

}  // namespace

agents::Update q_update(Method variant, const Vec& w, const Vec& h, int nf, int na, const SparseTransition& t,
                        double beta) {
    check_q_variant(variant);
    const int n = nf * na;
    if (w.size() != n || h.size() != n) throw std::invalid_argument("weight size must be n_actions * n_features");
    agents::Update u{Vec::Zero(n), Vec::Zero(n)};
    const int A = t.action;
    const int next = argmax_lowest(w, t.next_active, nf, na);
    const double delta = t.reward + t.gamma * block_sum(w, t.next_active, next * nf) - block_sum(w, t.active, A * nf);
    for (int i : t.active) u.dw[A * nf + i] += delta;
    if (variant == Method::qlearning) return u;

    const double hx = block_sum(h, t.active, A * nf);
    for (int j : t.next_active) u.dw[next * nf + j] -= t.gamma * hx;
    if (variant == Method::qrc && beta != 0.0) u.dh.segment(A * nf, nf) = -beta * h.segment(A * nf, nf);
    for (int i : t.active) u.dh[A * nf + i] += delta - hx;
    return u;
}

LinearQ::LinearQ(Method variant, int n_state_features, int n_actions, ControlHyper hyper)
    : variant_(variant),
      n_features_(n_state_features),
      n_actions_(n_actions),
      hyper_(hyper),
      w_(Vec::Zero(static_cast<Eigen::Index>(n_state_features) * n_actions)),
      h_(Vec::Zero(w_.size())) {
    check_q_variant(variant);
    if (n_actions < 1 || n_actions > 16) throw std::invalid_argument("LinearQ supports 1 to 16 actions");
    if (!(hyper.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(hyper.eta >= 0.0) || !(hyper.beta >= 0.0)) throw std::invalid_argument("eta and beta must be non-negative");
}

double LinearQ::value(std::span<const int> active, int a) const { return block_sum(w_, active, a * n_features_); }

int LinearQ::greedy(std::span<const int> active) const {
    return argmax_lowest(w_, active, n_features_, n_actions_);
}

int LinearQ::act(std::span<const int> active, double epsilon, Rng& rng) const {
    if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.uniform_int(n_actions_);
    double best_q = -std::numeric_limits<double>::infinity();
    int ties[16];
    int n_ties = 0;
    for (int a = 0; a < n_actions_; ++a) {
        double q = value(active, a);
        if (q > best_q) {
            best_q = q;
            n_ties = 0;
        }
        if (q == best_q && n_ties < 16) ties[n_ties++] = a;
    }
    return n_ties <= 1 ? ties[0] : ties[rng.uniform_int(n_ties)];
}

void LinearQ::update(const SparseTransition& t) {
    if (diverged_) return;
    const int nf = n_features_;
    const int A = t.action;
    const int next = greedy(t.next_active);
    const double delta = t.reward + t.gamma * value(t.next_active, next) - value(t.active, A);
    const double a = hyper_.alpha;
    const double hx = block_sum(h_, t.active, A * nf);

    for (int i : t.active) w_[A * nf + i] += a * delta;
    if (variant_ != Method::qlearning) {
        for (int j : t.next_active) w_[next * nf + j] += a * (-t.gamma * hx);
        const double ah = hyper_.eta * a;
        if (ah > 0.0) {
            if (variant_ == Method::qrc && hyper_.beta != 0.0) {
                auto block = h_.segment(A * nf, nf);
                block += ah * (-hyper_.beta * block);
            }
            for (int i : t.active) h_[A * nf + i] += ah * (delta - hx);
        }
    }
    for (int i : t.active)
        if (!std::isfinite(w_[A * nf + i]) || std::abs(w_[A * nf + i]) > agents::kDivergenceThreshold) diverged_ = true;
    for (int j : t.next_active)
        if (!std::isfinite(w_[next * nf + j]) || std::abs(w_[next * nf + j]) > agents::kDivergenceThreshold)
            diverged_ = true;
}

Vec softmax_policy(const Vec& theta, std::span<const int> active, int nf, int na) {
    Vec prefs(na);
    for (int a = 0; a < na; ++a) prefs[a] = block_sum(theta, active, a * nf);
    prefs.array() -= prefs.maxCoeff();
    prefs = prefs.array().exp();
    return prefs / prefs.sum();
}

Vec log_policy_gradient(const Vec& theta, std::span<const int> active, int action, int nf, int na) {
    Vec pi = softmax_policy(theta, active, nf, na);
    Vec g = Vec::Zero(theta.size());
    for (int a = 0; a < na; ++a) {
        double coeff = (a == action ? 1.0 : 0.0) - pi[a];
        for (int i : active) g[a * nf + i] += coeff;
    }
    return g;
}

namespace {

agents::Hyper critic_hyper(Method m, const ControlHyper& hp) {
    agents::Hyper out;
    out.alpha = hp.alpha;
    switch (m) {
        case Method::ac_td:
            out.eta = 0.0;
            out.beta = 0.0;
            break;
        case Method::ac_tdc:
            out.eta = hp.eta;
            out.beta = 0.0;
            break;
        case Method::ac_tdrc:
            out.eta = hp.eta;
            out.beta = hp.beta;
            break;
        default:
            throw std::invalid_argument("not an actor-critic method");
    }
    return out;
}

optim::OptimizerConfig with_alpha(optim::OptimizerConfig c, double alpha) {
    c.alpha = alpha;
    return c;
}

}  // namespace

ActorCritic::ActorCritic(Method variant, int n_state_features, int n_actions, ControlHyper hyper,
                         optim::OptimizerConfig optimizer)
    : n_features_(n_state_features),
      n_actions_(n_actions),
      critic_(agents::Algorithm::tdrc, critic_hyper(variant, hyper), optimizer, Vec::Zero(n_state_features)),
      theta_(Vec::Zero(static_cast<Eigen::Index>(n_state_features) * n_actions)),
      opt_theta_(with_alpha(optimizer, hyper.alpha), static_cast<int>(theta_.size())) {
    scratch_.x = Vec::Zero(n_state_features);
    scratch_.x_next = Vec::Zero(n_state_features);
}

Vec ActorCritic::dense(std::span<const int> active) const {
    Vec x = Vec::Zero(n_features_);
    for (int i : active) x[i] += 1.0;
    return x;
}

Vec ActorCritic::policy(std::span<const int> active) const {
    return softmax_policy(theta_, active, n_features_, n_actions_);
}

int ActorCritic::act(std::span<const int> active, Rng& rng) const {
    Vec pi = policy(active);
    return rng.categorical(pi, n_actions_);
}

void ActorCritic::update(const SparseTransition& t) {
    if (critic_.diverged()) return;
    scratch_.x = dense(t.active);
    scratch_.x_next = dense(t.next_active);
    scratch_.reward = t.reward;
    scratch_.gamma = t.gamma;
    scratch_.rho = 1.0;
    scratch_.action = t.action;
    const Vec& w = critic_.w();
    const double delta = t.reward + t.gamma * w.dot(scratch_.x_next) - w.dot(scratch_.x);
    Vec g = log_policy_gradient(theta_, t.active, t.action, n_features_, n_actions_);
    critic_.update(scratch_);
    opt_theta_.apply(theta_, delta * g);
}

}  // namespace tdrc::control
