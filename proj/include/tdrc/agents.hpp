#pragma once

#include <span>
#include <string>
#include <string_view>

#include "tdrc/optimizers.hpp"
#include "tdrc/types.hpp"

namespace tdrc::agents {

enum class Algorithm { td, vtrace, tdc, gtd2, htd, tdrc, tdcpp };

Algorithm parse_algorithm(std::string_view name);
std::string to_string(Algorithm alg);
bool uses_h(Algorithm alg);
bool uses_eta(Algorithm alg);
bool uses_beta(Algorithm alg);

struct Hyper {
    double alpha = 0.01;
    double eta = 1.0;
    double beta = 0.0;
    double clip = 1.0;
};

// Raw (pre-stepsize) update directions. eta is not folded in here; it scales
// the secondary optimizer's stepsize instead.
struct Update {
    Vec dw;
    Vec dh;
};

Update td_update(const Vec& w, const Transition& t);
Update vtrace_update(const Vec& w, const Transition& t, double clip);
Update tdc_update(const Vec& w, const Vec& h, const Transition& t);
Update gtd2_update(const Vec& w, const Vec& h, const Transition& t);
Update htd_update(const Vec& w, const Vec& h, const Transition& t);
Update tdrc_update(const Vec& w, const Vec& h, const Transition& t, double beta);
Update tdcpp_update(const Vec& w, const Vec& h, const Transition& t, double beta);

// Dispatching form that writes into `out` (resized as needed).
void raw_update(Algorithm alg, const Vec& w, const Vec& h, const Transition& t, const Hyper& hyper, Update& out);
Update raw_update(Algorithm alg, const Vec& w, const Vec& h, const Transition& t, const Hyper& hyper);

inline constexpr double kDivergenceThreshold = 1e10;

// Linear prediction learner: w and h each own an optimizer built from the
// same config, h's stepsize being alpha * eta.
class PredictionAgent {
public:
    PredictionAgent(Algorithm alg, Hyper hyper, optim::OptimizerConfig opt, Vec w0, Vec h0 = {});

    void update(const Transition& t);
    // Averages raw updates over the batch, then takes one optimizer step.
    void update_batch(std::span<const Transition* const> batch);

    const Vec& w() const { return w_; }
    const Vec& h() const { return h_; }
    Algorithm algorithm() const { return alg_; }
    const Hyper& hyper() const { return hyper_; }
    // Set once an update would push any weight outside [-1e10, 1e10] or make
    // it non-finite. That update is discarded and the weights stay frozen.
    bool diverged() const { return diverged_; }

private:
    void apply(const Update& u);

    Algorithm alg_;
    Hyper hyper_;
    Vec w_;
    Vec h_;
    Vec w_prev_;
    Vec h_prev_;
    optim::Optimizer opt_w_;
    optim::Optimizer opt_h_;
    bool update_h_;
    bool diverged_ = false;
    Update scratch_;
    Update sum_;
};

}  // namespace tdrc::agents
