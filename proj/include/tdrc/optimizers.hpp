#pragma once

#include <string>
#include <string_view>

#include "tdrc/types.hpp"

namespace tdrc::optim {

enum class Kind { constant, adagrad, adam };

Kind parse_kind(std::string_view name);
std::string to_string(Kind kind);

struct OptimizerConfig {
    Kind kind = Kind::constant;
    double alpha = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

// Turns a raw ascent direction into a weight delta. Each weight vector owns
// its own Optimizer, so accumulators are never shared between w and h.
class Optimizer {
public:
    Optimizer(OptimizerConfig config, int n);

    // Returns the delta to add to the weights.
    Vec step(const Vec& raw);
    // Adds the delta to `weights` without allocating.
    void apply(Vec& weights, const Vec& raw);

    const OptimizerConfig& config() const { return config_; }
    const Vec& second_moment() const { return v_; }
    const Vec& first_moment() const { return m_; }
    long steps() const { return t_; }

    // Per-coordinate multiplier on the raw update for the next call
    // (Adagrad: alpha / (sqrt(G) + eps) using the current accumulator).
    Vec effective_stepsize() const;

private:
    OptimizerConfig config_;
    Vec v_;
    Vec m_;
    long t_ = 0;
};

}  // namespace tdrc::optim
