#include "tdrc/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tdrc::agents {

Algorithm parse_algorithm(std::string_view name) {
    if (name == "td") return Algorithm::td;
    if (name == "vtrace") return Algorithm::vtrace;
    if (name == "tdc") return Algorithm::tdc;
    if (name == "gtd2") return Algorithm::gtd2;
    if (name == "htd") return Algorithm::htd;
    if (name == "tdrc") return Algorithm::tdrc;
    if (name == "tdcpp") return Algorithm::tdcpp;
    throw std::invalid_argument("unknown prediction algorithm: " + std::string(name));
}

std::string to_string(Algorithm alg) {
    switch (alg) {
        case Algorithm::td: return "td";
        case Algorithm::vtrace: return "vtrace";
        case Algorithm::tdc: return "tdc";
        case Algorithm::gtd2: return "gtd2";
        case Algorithm::htd: return "htd";
        case Algorithm::tdrc: return "tdrc";
        case Algorithm::tdcpp: return "tdcpp";
    }
    return "?";
}

bool uses_h(Algorithm alg) { return alg != Algorithm::td && alg != Algorithm::vtrace; }
bool uses_eta(Algorithm alg) { return uses_h(alg); }
bool uses_beta(Algorithm alg) { return alg == Algorithm::tdrc || alg == Algorithm::tdcpp; }

namespace {

double td_error(const Vec& w, const Transition& t) {
    return t.reward + t.gamma * w.dot(t.x_next) - w.dot(t.x);
}

}  // namespace

void raw_update(Algorithm alg, const Vec& w, const Vec& h, const Transition& t, const Hyper& hyper, Update& out) {
    const double delta = td_error(w, t);
    const double rho = t.rho;
    switch (alg) {
        case Algorithm::td:
            out.dw = (rho * delta) * t.x;
            out.dh.setZero(w.size());
            return;
        case Algorithm::vtrace:
            out.dw = (std::min(rho, hyper.clip) * delta) * t.x;
            out.dh.setZero(w.size());
            return;
        default:
            break;
    }

    const double hx = h.dot(t.x);
    switch (alg) {
        case Algorithm::tdc:
        case Algorithm::tdrc:
        case Algorithm::tdcpp:
            out.dw = (rho * delta) * t.x - (rho * t.gamma * hx) * t.x_next;
            out.dh = (rho * delta - hx) * t.x;
            if (alg != Algorithm::tdc && hyper.beta != 0.0) {
                out.dh -= hyper.beta * h;
                if (alg == Algorithm::tdcpp) out.dw -= hyper.beta * h;
            }
            return;
        case Algorithm::gtd2:
            out.dw = (rho * hx) * (t.x - t.gamma * t.x_next);
            out.dh = (rho * delta - hx) * t.x;
            return;
        case Algorithm::htd: {
            const double hd = h.dot(t.x) - t.gamma * h.dot(t.x_next);
            out.dw = (rho * delta) * t.x;
            if (rho != 1.0) out.dw += ((rho - 1.0) * hd) * t.x;
            out.dh = (rho * delta) * t.x - hd * t.x;
            return;
        }
        default:
            break;
    }
    throw std::logic_error("unhandled algorithm");
}

Update raw_update(Algorithm alg, const Vec& w, const Vec& h, const Transition& t, const Hyper& hyper) {
    Update u;
    raw_update(alg, w, h, t, hyper, u);
    return u;
}

Update td_update(const Vec& w, const Transition& t) {
    return raw_update(Algorithm::td, w, Vec::Zero(w.size()), t, {});
}

Update vtrace_update(const Vec& w, const Transition& t, double clip) {
    if (!(clip > 0.0)) throw std::invalid_argument("vtrace clip must be positive");
    Hyper hp;
    hp.clip = clip;
    return raw_update(Algorithm::vtrace, w, Vec::Zero(w.size()), t, hp);
}

Update tdc_update(const Vec& w, const Vec& h, const Transition& t) { return raw_update(Algorithm::tdc, w, h, t, {}); }

Update gtd2_update(const Vec& w, const Vec& h, const Transition& t) {
    return raw_update(Algorithm::gtd2, w, h, t, {});
}

Update htd_update(const Vec& w, const Vec& h, const Transition& t) { return raw_update(Algorithm::htd, w, h, t, {}); }

Update tdrc_update(const Vec& w, const Vec& h, const Transition& t, double beta) {
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
    Hyper hp;
    hp.beta = beta;
    return raw_update(Algorithm::tdrc, w, h, t, hp);
}

Update tdcpp_update(const Vec& w, const Vec& h, const Transition& t, double beta) {
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
    Hyper hp;
    hp.beta = beta;
    return raw_update(Algorithm::tdcpp, w, h, t, hp);
}

namespace {

optim::OptimizerConfig secondary_config(optim::OptimizerConfig opt, const Hyper& hyper) {
    opt.alpha = hyper.alpha * hyper.eta;
    if (!(opt.alpha > 0.0)) opt.alpha = 1.0;  // unused: h is frozen when eta == 0
    return opt;
}

optim::OptimizerConfig primary_config(optim::OptimizerConfig opt, const Hyper& hyper) {
    opt.alpha = hyper.alpha;
    return opt;
}

}  // namespace

PredictionAgent::PredictionAgent(Algorithm alg, Hyper hyper, optim::OptimizerConfig opt, Vec w0, Vec h0)
    : alg_(alg),
      hyper_(hyper),
      w_(std::move(w0)),
      h_(h0.size() ? std::move(h0) : Vec::Zero(w_.size())),
      opt_w_(primary_config(opt, hyper), static_cast<int>(w_.size())),
      opt_h_(secondary_config(opt, hyper), static_cast<int>(w_.size())),
      update_h_(uses_h(alg) && hyper.eta > 0.0) {
    if (h_.size() != w_.size()) throw std::invalid_argument("h0 and w0 differ in length");
    if (!(hyper.eta >= 0.0)) throw std::invalid_argument("eta must be non-negative");
    if (!(hyper.beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
    if (!(hyper.clip > 0.0)) throw std::invalid_argument("clip must be positive");
}

void PredictionAgent::apply(const Update& u) {
    w_prev_ = w_;
    h_prev_ = h_;
    opt_w_.apply(w_, u.dw);
    if (update_h_) opt_h_.apply(h_, u.dh);
    const double limit = kDivergenceThreshold;
    auto bad = [limit](const Vec& v) { return !v.allFinite() || v.cwiseAbs().maxCoeff() > limit; };
    if (bad(w_) || bad(h_)) {
        diverged_ = true;
        w_ = w_prev_;
        h_ = h_prev_;
    }
}

void PredictionAgent::update(const Transition& t) {
    if (diverged_) return;
    raw_update(alg_, w_, h_, t, hyper_, scratch_);
    apply(scratch_);
}

void PredictionAgent::update_batch(std::span<const Transition* const> batch) {
    if (diverged_ || batch.empty()) return;
    sum_.dw.setZero(w_.size());
    sum_.dh.setZero(w_.size());
    for (const Transition* t : batch) {
        raw_update(alg_, w_, h_, *t, hyper_, scratch_);
        sum_.dw += scratch_.dw;
        sum_.dh += scratch_.dh;
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    sum_.dw *= inv;
    sum_.dh *= inv;
    apply(sum_);
}

}  // namespace tdrc::agents
